#include "vsense/sensor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "vsense/errors.hpp"
#include "vsense/parallel.hpp"
#include "vsense/pgm.hpp"

namespace vsense {

ImageRaster load_image(const std::filesystem::path& path) {
    ImageRaster img;
    if (path.extension() == ".csv") {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::size_t start = 0;
            int cols = 0;
            while (start <= line.size()) {
                const auto comma = line.find(',', start);
                const std::string tok =
                    line.substr(start, comma == std::string::npos ? std::string::npos
                                                                  : comma - start);
                try {
                    std::size_t used = 0;
                    const double v = std::stod(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                    img.samples.push_back(v);
                } catch (const std::exception&) {
                    throw IoError("bad CSV sample '" + tok + "' in " + path.string());
                }
                ++cols;
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (img.width == 0) img.width = cols;
            else if (cols != img.width)
                throw IoError("ragged CSV rows in " + path.string());
            ++img.height;
        }
        if (img.width <= 0 || img.height <= 0) throw IoError("empty CSV image: " + path.string());
        for (double v : img.samples)
            if (!(v >= 0.0 && v <= 1.0))
                throw IoError("CSV intensity outside [0,1] in " + path.string());
        return img;
    }

    const PgmImage pgm = read_pgm(path);
    img.width = pgm.width;
    img.height = pgm.height;
    img.samples.resize(pgm.samples.size());
    const double inv = 1.0 / pgm.maxval;
    for (std::size_t i = 0; i < pgm.samples.size(); ++i) img.samples[i] = pgm.samples[i] * inv;
    return img;
}

namespace {

// Bilinear sample of the raster at pixel coordinates (clamped at edges).
double sample_raster(const ImageRaster& img, double u, double v) {
    u = std::clamp(u, 0.0, static_cast<double>(img.width - 1));
    v = std::clamp(v, 0.0, static_cast<double>(img.height - 1));
    int px = std::min(static_cast<int>(std::floor(u)), img.width - 2 >= 0 ? img.width - 2 : 0);
    int py = std::min(static_cast<int>(std::floor(v)), img.height - 2 >= 0 ? img.height - 2 : 0);
    if (img.width == 1) px = 0;
    if (img.height == 1) py = 0;
    const int px1 = std::min(px + 1, img.width - 1);
    const int py1 = std::min(py + 1, img.height - 1);
    const double fx = u - px;
    const double fy = v - py;
    const auto at = [&](int x, int y) {
        return img.samples[static_cast<std::size_t>(y) * img.width + x];
    };
    return at(px, py) * (1.0 - fx) * (1.0 - fy) + at(px1, py) * fx * (1.0 - fy) +
           at(px, py1) * (1.0 - fx) * fy + at(px1, py1) * fx * fy;
}

}  // namespace

PolarizationMap to_polarization(const ImageRaster& image, const GridSpec& spec, double gain,
                                PolarizationMode mode) {
    if (!(std::isfinite(gain) && gain > 0.0))
        throw ConfigError("to_polarization: gain must be positive");
    if (image.width <= 0 || image.height <= 0)
        throw ConfigError("to_polarization: empty image");

    PolarizationMap pol;
    pol.gain = gain;
    pol.mode = mode;
    if (mode == PolarizationMode::unipolar) {
        pol.offset = 0.0;
    } else {
        pol.offset = -gain;  // rho = 2*gain*I - gain
    }
    pol.rho_bg = ScalarField(spec);

    // Image top-left corner maps to (-Lx, +Ly); cell centers sample the
    // raster bilinearly at matching fractional pixel coordinates.
    const double sx = image.width / (2.0 * spec.half_extent_x);
    const double sy = image.height / (2.0 * spec.half_extent_y);
    for_each_row(spec.ny, [&](int iy) {
        const double y = spec.y(iy);
        const double v = (spec.half_extent_y - y) * sy - 0.5;
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double u = (spec.x(ix) + spec.half_extent_x) * sx - 0.5;
            const double intensity = sample_raster(image, u, v);
            pol.rho_bg.at(ix, iy) = mode == PolarizationMode::unipolar
                                        ? gain * intensity
                                        : gain * (2.0 * intensity - 1.0);
        }
    });
    return pol;
}

ScalarField effective_field(const PolarizationMap& pol, const PhysicalConstants& constants) {
    ScalarField b(pol.rho_bg.spec);
    const double scale = -1.0 / constants.kappa;
    for (std::size_t i = 0; i < b.values.size(); ++i)
        b.values[i] = scale * pol.rho_bg.values[i];
    return b;
}

namespace {

struct WindowSum {
    double sum = 0.0;
    long long count = 0;
    WindowSum& operator+=(const WindowSum& o) {
        sum += o.sum;
        count += o.count;
        return *this;
    }
};

// Deterministic reduction over cells inside the disk: row partials in
// strict left-to-right order, rows combined in order.
template <class CellFn>
WindowSum window_reduce(const GridSpec& spec, Complex center, double radius, CellFn&& fn) {
    const double r2 = radius * radius;
    return reduce_rows<WindowSum>(spec.ny, [&](int iy) {
        WindowSum part;
        const double dy = spec.y(iy) - center.imag();
        if (std::abs(dy) > radius) return part;
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double dx = spec.x(ix) - center.real();
            if (dx * dx + dy * dy > r2) continue;
            part.sum += fn(ix, iy, dx, dy);
            part.count += 1;
        }
        return part;
    });
}

void check_window(const GridSpec& spec, Complex center, double radius, const char* what) {
    if (std::abs(center.real()) + radius > spec.half_extent_x ||
        std::abs(center.imag()) + radius > spec.half_extent_y)
        throw ConfigError(std::string(what) + ": window out of bounds");
}

}  // namespace

double window_mean(const ScalarField& field, Complex center, double radius) {
    check_window(field.spec, center, radius, "window_mean");
    const WindowSum ws = window_reduce(
        field.spec, center, radius,
        [&](int ix, int iy, double, double) { return field.at(ix, iy); });
    if (ws.count == 0) throw ConfigError("window_mean: window contains no cells");
    return ws.sum / static_cast<double>(ws.count);
}

SensorFeatures extract_features(const PolarizationMap& pol, const HoleLattice& lattice,
                                const SensorConfig& config) {
    const GridSpec& spec = pol.rho_bg.spec;
    if (lattice.centers.empty()) throw ConfigError("extract_features: empty hole lattice");
    if (!(lattice.core_radius > 0.0))
        throw ConfigError("extract_features: core radius must be positive");
    if (lattice.window_radius < 3.0 * lattice.core_radius)
        throw ConfigError("extract_features: window radius must be >= 3 * core radius");
    for (const auto& c : lattice.centers)
        check_window(spec, c, lattice.window_radius, "extract_features");
    if (!(config.t_sample >= 0.0) || config.t_sample >= 1.0)
        throw ConfigError("extract_features: t_sample must lie in [0, 1)");
    // omega_b * t is t_sample * pi for every nonzero omega_b, so the
    // singular-time check does not depend on the image.
    if (std::abs(std::cos(config.t_sample * M_PI)) <= kSingularCosine)
        throw std::domain_error("extract_features: t_sample hits the focusing singularity");

    const ScalarField b_eff = effective_field(pol, config.constants);

    SensorFeatures features;
    features.holes.resize(lattice.centers.size());
    for (std::size_t j = 0; j < lattice.centers.size(); ++j) {
        const Complex center = lattice.centers[j];
        HoleFeatures& out = features.holes[j];
        out.center = center;
        out.omega_b = window_mean(b_eff, center, lattice.window_radius);

        const VortexConfiguration single({HoleSpec{center, lattice.core_radius}},
                                         config.winding, config.helicity, config.constants);
        const double cell_area = spec.hx() * spec.hy();
        if (out.omega_b == 0.0) {
            const WindowSum q = window_reduce(
                spec, center, lattice.window_radius, [&](int ix, int iy, double dx, double dy) {
                    return (dx * dx + dy * dy) *
                           charge_density_at(single, spec.x(ix), spec.y(iy));
                });
            out.q_moment = q.sum * cell_area;
        } else {
            const double period = M_PI / std::abs(out.omega_b);
            const EvolvedState state{single, BackgroundDrive{out.omega_b, center},
                                     config.t_sample * period};
            const WindowSum q = window_reduce(
                spec, center, lattice.window_radius, [&](int ix, int iy, double dx, double dy) {
                    const Complex v = evolve_at(state, spec.x(ix), spec.y(iy));
                    return (dx * dx + dy * dy) *
                           (v.real() * v.real() + v.imag() * v.imag());
                });
            out.q_moment = q.sum * cell_area;
        }
        out.energy = excitation_energy(out.q_moment, out.omega_b, config.constants);
    }
    return features;
}

std::vector<Complex> features_to_vector(const SensorFeatures& features, Normalization norm) {
    const std::size_t n = features.holes.size();
    if (n == 0) throw ConfigError("features_to_vector: no holes");
    std::vector<double> comps(3 * n);
    for (std::size_t j = 0; j < n; ++j) {
        comps[3 * j + 0] = features.holes[j].omega_b;
        comps[3 * j + 1] = features.holes[j].q_moment;
        comps[3 * j + 2] = features.holes[j].energy;
    }
    if (norm == Normalization::zscore) {
        for (int c = 0; c < 3; ++c) {
            double mean = 0.0;
            for (std::size_t j = 0; j < n; ++j) mean += comps[3 * j + c];
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = comps[3 * j + c] - mean;
                var += d * d;
            }
            const double sd = std::sqrt(var / static_cast<double>(n));
            for (std::size_t j = 0; j < n; ++j)
                comps[3 * j + c] = sd > 0.0 ? (comps[3 * j + c] - mean) / sd : 0.0;
        }
    }
    double norm2 = 0.0;
    for (double v : comps) norm2 += v * v;
    if (!(norm2 > 0.0)) throw ConfigError("features_to_vector: zero-norm feature vector");
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<Complex> out(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) out[i] = Complex(comps[i] * inv, 0.0);
    return out;
}

void to_json(nlohmann::json& j, const SensorFeatures& features) {
    nlohmann::json holes = nlohmann::json::array();
    for (const auto& h : features.holes)
        holes.push_back({{"center", {h.center.real(), h.center.imag()}},
                         {"omega_b", h.omega_b},
                         {"q_moment", h.q_moment},
                         {"energy", h.energy}});
    j = nlohmann::json{{"schema_version", 1},
                       {"image_id", features.image_id},
                       {"lattice_id", features.lattice_id},
                       {"config_hash", features.config_hash},
                       {"holes", holes}};
}

void from_json(const nlohmann::json& j, SensorFeatures& features) {
    features = SensorFeatures{};
    features.image_id = j.value("image_id", "");
    features.lattice_id = j.value("lattice_id", "");
    features.config_hash = j.value("config_hash", "");
    for (const auto& h : j.at("holes")) {
        HoleFeatures f;
        f.center = Complex(h.at("center").at(0).get<double>(), h.at("center").at(1).get<double>());
        f.omega_b = h.at("omega_b").get<double>();
        f.q_moment = h.at("q_moment").get<double>();
        f.energy = h.at("energy").get<double>();
        features.holes.push_back(f);
    }
}

SensorFeatures read_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        return j.get<SensorFeatures>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad features document " + path.string() + ": " + e.what());
    }
}

void write_features(const SensorFeatures& features, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const nlohmann::json j = features;
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

void write_features_csv(const SensorFeatures& features, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    out << "index,center_x,center_y,omega_b,q_moment,energy\n";
    for (std::size_t j = 0; j < features.holes.size(); ++j) {
        const HoleFeatures& h = features.holes[j];
        out << j << ',' << num(h.center.real()) << ',' << num(h.center.imag()) << ','
            << num(h.omega_b) << ',' << num(h.q_moment) << ',' << num(h.energy) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace vsense
