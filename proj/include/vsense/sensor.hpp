#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vsense/dynamics.hpp"
#include "vsense/grid.hpp"
#include "vsense/soliton.hpp"

#include "json.hpp"

namespace vsense {

/// Grayscale raster with intensities normalized to [0, 1], row-major,
/// top-left sample first.
struct ImageRaster {
    int width = 0;
    int height = 0;
    std::vector<double> samples;
};

/// Loads a PGM (P2/P5, maxval <= 65535) or a CSV grid of values in [0, 1].
/// The format is picked by extension (.csv is CSV, anything else is PGM).
ImageRaster load_image(const std::filesystem::path& path);

enum class PolarizationMode { unipolar, bipolar };

/// Background spin-polarized charge density induced by the image:
/// rho = gain * I (unipolar) or gain * (2 I - 1) (bipolar), resampled
/// bilinearly onto the grid. |rho| <= gain everywhere. The image top-left
/// corner maps to (-Lx, +Ly).
struct PolarizationMap {
    ScalarField rho_bg;
    double gain = 1.0;
    double offset = 0.0;  // rho = effective_gain * I + offset
    PolarizationMode mode = PolarizationMode::unipolar;
};

PolarizationMap to_polarization(const ImageRaster& image, const GridSpec& spec,
                                double gain, PolarizationMode mode);

/// B_eff = -rho_bg / kappa (natural units).
ScalarField effective_field(const PolarizationMap& pol, const PhysicalConstants& constants);

/// Hole positions sharing one core radius and one sampling window radius.
/// Windows must lie inside the grid; w >= 3 r0.
struct HoleLattice {
    std::vector<Complex> centers;
    double core_radius = 1.0;
    double window_radius = 3.0;
};

struct HoleFeatures {
    Complex center{0.0, 0.0};
    double omega_b = 0.0;  // window mean of B_eff
    double q_moment = 0.0; // windowed quadrupole of the evolved density
    double energy = 0.0;
};

struct SensorFeatures {
    std::vector<HoleFeatures> holes;
    std::string image_id;
    std::string lattice_id;
    std::string config_hash;
};

struct SensorConfig {
    PhysicalConstants constants{};
    int winding = 2;
    int helicity = +1;
    double t_sample = 0.25;  // fraction of the density period pi/|omega_b|
};

/// Per-hole read-out: omega_b as the window mean of B_eff, the single
/// vortex evolved to t_sample * pi / |omega_b| (static when omega_b == 0),
/// the windowed quadrupole of that density, and the excitation energy.
SensorFeatures extract_features(const PolarizationMap& pol, const HoleLattice& lattice,
                                const SensorConfig& config);

/// Mean of the field over cells within `radius` of `center`, deterministic
/// row order.
double window_mean(const ScalarField& field, Complex center, double radius);

enum class Normalization { none, zscore };

/// Concatenates (omega_b, Q, E) per hole, optionally standardizes each
/// component across holes, embeds as complex amplitudes with zero
/// imaginary part, and normalizes to unit norm. Throws ConfigError when
/// the result would have zero norm.
std::vector<Complex> features_to_vector(const SensorFeatures& features, Normalization norm);

void to_json(nlohmann::json& j, const SensorFeatures& features);
void from_json(const nlohmann::json& j, SensorFeatures& features);
SensorFeatures read_features(const std::filesystem::path& path);
void write_features(const SensorFeatures& features, const std::filesystem::path& path);

/// One CSV row per hole: index, center_x, center_y, omega_b, q_moment,
/// energy (round-trip precision).
void write_features_csv(const SensorFeatures& features, const std::filesystem::path& path);

}  // namespace vsense
