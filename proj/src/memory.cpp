#include "vsense/memory.hpp"

#include <cmath>
#include <fstream>

#include "vsense/errors.hpp"

#include "json.hpp"

namespace vsense {

Complex pattern_dot(const Pattern& a, const Pattern& b) {
    if (a.size() != b.size()) throw ConfigError("pattern_dot: dimension mismatch");
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double pattern_norm(const Pattern& a) {
    double acc = 0.0;
    for (const Complex& v : a) acc += v.real() * v.real() + v.imag() * v.imag();
    return std::sqrt(acc);
}

PatternMemory PatternMemory::store(const Pattern& pattern, const std::string& label) const {
    if (pattern.empty()) throw ConfigError("store: empty pattern");
    if (!patterns_.empty() && pattern.size() != dimension())
        throw ConfigError("store: dimension mismatch");
    for (const auto& p : patterns_)
        if (p.label == label) throw ConfigError("store: duplicate label '" + label + "'");
    const double norm = pattern_norm(pattern);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ConfigError("store: zero or non-finite pattern");

    PatternMemory next = *this;
    StoredPattern stored{label, pattern};
    for (Complex& v : stored.data) v /= norm;
    next.patterns_.push_back(std::move(stored));
    return next;
}

PatternMemory PatternMemory::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        PatternMemory memory;
        const std::size_t dim = j.at("dimension").get<std::size_t>();
        for (const auto& p : j.at("patterns")) {
            const auto& data = p.at("data");
            if (data.size() != 2 * dim) throw IoError("pattern size mismatch in " + path.string());
            Pattern pat(dim);
            for (std::size_t i = 0; i < dim; ++i)
                pat[i] = Complex(data.at(2 * i).get<double>(), data.at(2 * i + 1).get<double>());
            // Stored documents already hold unit-norm data; re-store keeps
            // the invariant without changing the values.
            memory.patterns_.push_back({p.at("label").get<std::string>(), std::move(pat)});
        }
        for (const auto& p : memory.patterns_) {
            const double norm = pattern_norm(p.data);
            if (std::abs(norm - 1.0) > 1e-12)
                throw IoError("stored pattern '" + p.label + "' is not unit norm in " +
                              path.string());
        }
        return memory;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad memory document " + path.string() + ": " + e.what());
    }
}

void PatternMemory::save(const std::filesystem::path& path) const {
    nlohmann::json patterns = nlohmann::json::array();
    for (const auto& p : patterns_) {
        nlohmann::json data = nlohmann::json::array();
        for (const Complex& v : p.data) {
            data.push_back(v.real());
            data.push_back(v.imag());
        }
        patterns.push_back({{"label", p.label}, {"data", data}});
    }
    const nlohmann::json j{
        {"schema_version", 1}, {"dimension", dimension()}, {"patterns", patterns}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

Pattern green_apply(const PatternMemory& memory, const Pattern& input) {
    if (memory.empty()) throw ConfigError("green_apply: empty memory");
    if (input.size() != memory.dimension()) throw ConfigError("green_apply: dimension mismatch");
    Pattern out(input.size(), Complex{0.0, 0.0});
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const StoredPattern& p = memory.pattern(k);
        const Complex coeff = pattern_dot(p.data, input);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff * p.data[i];
    }
    return out;
}

RecallResult recall(const PatternMemory& memory, const Pattern& input, double tie_epsilon) {
    if (memory.empty()) throw ConfigError("recall: empty memory");
    if (input.size() != memory.dimension()) throw ConfigError("recall: dimension mismatch");
    const double input_norm = pattern_norm(input);
    if (!(input_norm > 0.0)) throw ConfigError("recall: zero input");

    std::size_t best = 0, second = 0;
    double best_mag = -1.0, second_mag = -1.0;
    Complex best_coeff{0.0, 0.0};
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const Complex coeff = pattern_dot(memory.pattern(k).data, input);
        const double mag = std::abs(coeff);
        if (mag > best_mag) {
            second = best;
            second_mag = best_mag;
            best = k;
            best_mag = mag;
            best_coeff = coeff;
        } else if (mag > second_mag) {
            second = k;
            second_mag = mag;
        }
    }

    RecallResult result;
    result.winner_index = best;
    result.winner_label = memory.pattern(best).label;
    result.overlap = best_mag / input_norm;
    if (memory.size() > 1) {
        result.runner_up_index = second;
        result.runner_up_label = memory.pattern(second).label;
        result.runner_up_overlap = second_mag / input_norm;
        result.ambiguous = (best_mag - second_mag) < tie_epsilon * input_norm;
    }
    result.output.resize(input.size());
    const Pattern& winner = memory.pattern(best).data;
    for (std::size_t i = 0; i < winner.size(); ++i) result.output[i] = best_coeff * winner[i];
    return result;
}

std::vector<std::vector<double>> overlap_matrix(const PatternMemory& memory) {
    if (memory.empty()) throw ConfigError("overlap_matrix: empty memory");
    const std::size_t n = memory.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            m[j][k] = std::abs(pattern_dot(memory.pattern(j).data, memory.pattern(k).data));
    return m;
}

}  // namespace vsense
