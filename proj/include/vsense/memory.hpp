#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vsense/grid.hpp"

namespace vsense {

using Pattern = std::vector<Complex>;

/// sum(conj(a[i]) * b[i]).
Complex pattern_dot(const Pattern& a, const Pattern& b);
double pattern_norm(const Pattern& a);

struct StoredPattern {
    std::string label;
    Pattern data;  // unit norm
};

/// Ordered set of unit-norm complex patterns with unique labels.
/// Immutable once built; store() returns a new memory.
class PatternMemory {
  public:
    PatternMemory() = default;

    std::size_t size() const { return patterns_.size(); }
    bool empty() const { return patterns_.empty(); }
    std::size_t dimension() const { return patterns_.empty() ? 0 : patterns_.front().data.size(); }
    const StoredPattern& pattern(std::size_t k) const { return patterns_.at(k); }

    /// Normalizes and appends. Throws ConfigError on a zero pattern,
    /// duplicate label, or dimension mismatch.
    [[nodiscard]] PatternMemory store(const Pattern& pattern, const std::string& label) const;

    static PatternMemory load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

  private:
    std::vector<StoredPattern> patterns_;
};

/// Green's-function action: output = sum_k <psi_k, input> psi_k. Acts as
/// the projector onto the span when the stored set is orthonormal.
Pattern green_apply(const PatternMemory& memory, const Pattern& input);

struct RecallResult {
    std::size_t winner_index = 0;
    std::string winner_label;
    double overlap = 0.0;            // |<psi_k, input/|input|>|
    std::size_t runner_up_index = 0;
    std::string runner_up_label;
    double runner_up_overlap = 0.0;
    bool ambiguous = false;
    Pattern output;  // <psi_k, input> psi_k, raw input
};

inline constexpr double kTieEpsilon = 1e-9;

/// Dominant-overlap projection: winner k maximizes |<psi_k, input>|, ties
/// broken by lowest index and flagged ambiguous when the top two overlap
/// magnitudes differ by less than tie_epsilon.
RecallResult recall(const PatternMemory& memory, const Pattern& input,
                    double tie_epsilon = kTieEpsilon);

/// M[j][k] = |<psi_j, psi_k>|; crosstalk diagnostic.
std::vector<std::vector<double>> overlap_matrix(const PatternMemory& memory);

}  // namespace vsense
