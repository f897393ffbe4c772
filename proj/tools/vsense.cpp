// Batch driver: soliton fields and reports, image sensing, pattern store
// and recall. All outputs are deterministic functions of the inputs.

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vsense/dynamics.hpp"
#include "vsense/errors.hpp"
#include "vsense/fnv.hpp"
#include "vsense/grid.hpp"
#include "vsense/memory.hpp"
#include "vsense/pgm.hpp"
#include "vsense/sensor.hpp"
#include "vsense/soliton.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw vsense::ConfigError("cannot open config file " + path.string());
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw vsense::ConfigError("malformed config " + path.string() + ": " + e.what());
    }
}

json read_json_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw vsense::IoError("cannot open " + path.string());
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw vsense::IoError("malformed document " + path.string() + ": " + e.what());
    }
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw vsense::IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw vsense::IoError("write failed: " + path.string());
}

std::string file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vsense::IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunConfig {
    vsense::PhysicalConstants constants;
    int winding = 2;
    int helicity = +1;
    double core_radius = 1.0;
    vsense::GridSpec grid;
    std::vector<vsense::Complex> holes;
    double gain = 0.2;
    vsense::PolarizationMode mode = vsense::PolarizationMode::unipolar;
    double window_radius = 3.0;
    double t_sample = 0.25;
    std::string config_hash;
};

// Flag overrides applied on top of the config document.
struct Overrides {
    std::optional<double> kappa, core_radius, gain, t_sample, window_radius;
    std::optional<int> winding, helicity;
};

RunConfig parse_config(const fs::path& path, const Overrides& over = {}) {
    json j = read_json_config(path);
    if (over.kappa) j["physics"]["kappa"] = *over.kappa;
    if (over.winding) j["physics"]["winding"] = *over.winding;
    if (over.helicity) j["physics"]["helicity"] = *over.helicity;
    if (over.core_radius) j["physics"]["core_radius"] = *over.core_radius;
    if (over.gain) j["sensor"]["gain"] = *over.gain;
    if (over.t_sample) j["sensor"]["t_sample"] = *over.t_sample;
    if (over.window_radius) j["sensor"]["window_radius"] = *over.window_radius;
    try {
        RunConfig cfg;
        const json& phys = j.at("physics");
        cfg.constants = vsense::PhysicalConstants(phys.at("kappa").get<double>());
        cfg.winding = phys.at("winding").get<int>();
        cfg.helicity = phys.at("helicity").get<int>();
        cfg.core_radius = phys.at("core_radius").get<double>();

        const json& grid = j.at("grid");
        cfg.grid = vsense::GridSpec(grid.at("half_extent_x").get<double>(),
                                    grid.at("half_extent_y").get<double>(),
                                    grid.at("nx").get<int>(), grid.at("ny").get<int>());

        for (const auto& h : j.at("holes"))
            cfg.holes.emplace_back(h.at(0).get<double>(), h.at(1).get<double>());

        if (j.contains("sensor")) {
            const json& s = j.at("sensor");
            cfg.gain = s.value("gain", cfg.gain);
            const std::string mode = s.value("mode", std::string("unipolar"));
            if (mode == "unipolar") cfg.mode = vsense::PolarizationMode::unipolar;
            else if (mode == "bipolar") cfg.mode = vsense::PolarizationMode::bipolar;
            else throw vsense::ConfigError("unknown sensor mode '" + mode + "'");
            cfg.window_radius = s.value("window_radius", cfg.window_radius);
            cfg.t_sample = s.value("t_sample", cfg.t_sample);
        }
        cfg.config_hash = vsense::fnv1a_hex(j.dump());
        return cfg;
    } catch (const json::exception& e) {
        throw vsense::ConfigError("bad config " + path.string() + ": " + e.what());
    }
}

vsense::VortexConfiguration vortex_from(const RunConfig& cfg) {
    std::vector<vsense::HoleSpec> holes;
    for (const auto& c : cfg.holes) holes.push_back({c, cfg.core_radius});
    return vsense::VortexConfiguration(std::move(holes), cfg.winding, cfg.helicity,
                                       cfg.constants);
}

void write_density_pgm(const vsense::ScalarField& field, const fs::path& path) {
    double lo = field.values.empty() ? 0.0 : field.values.front();
    double hi = lo;
    for (double v : field.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::vector<std::uint8_t> bytes(field.values.size());
    // Image rows run top to bottom; grid rows run bottom to top.
    for (int iy = 0; iy < field.spec.ny; ++iy)
        for (int ix = 0; ix < field.spec.nx; ++ix) {
            const double v = field.at(ix, field.spec.ny - 1 - iy);
            bytes[static_cast<std::size_t>(iy) * field.spec.nx + ix] =
                static_cast<std::uint8_t>(std::lround((v - lo) * scale));
        }
    vsense::write_pgm8(path, field.spec.nx, field.spec.ny, bytes);
    write_json(json{{"min", lo},
                    {"max", hi},
                    {"width", field.spec.nx},
                    {"height", field.spec.ny},
                    {"scaling", "linear-minmax"},
                    {"row_order", "top-to-bottom = +y to -y"}},
               fs::path(path).concat(".json"));
}

int cmd_soliton(const fs::path& config_path, const fs::path& out_dir, const Overrides& over) {
    const RunConfig cfg = parse_config(config_path, over);
    const vsense::VortexConfiguration vortex = vortex_from(cfg);
    fs::create_directories(out_dir);

    const vsense::ScalarField rho = vsense::charge_density(vortex, cfg.grid);
    vsense::write_csv(rho, out_dir / "density.csv");
    write_density_pgm(rho, out_dir / "density.pgm");

    const vsense::SpinCurrent current = vsense::spin_current(vortex, cfg.grid);
    vsense::write_csv(current.jx, out_dir / "current_x.csv");
    vsense::write_csv(current.jy, out_dir / "current_y.csv");

    const double flux = -vsense::integrate(rho) / cfg.constants.kappa;
    const double per_hole = 4.0 * M_PI * cfg.winding * cfg.constants.C();
    const double expected =
        -(cfg.constants.kappa > 0 ? 1.0 : -1.0) * per_hole * static_cast<double>(cfg.holes.size());
    const double tail = vsense::flux_tail_bound(vortex, cfg.grid);
    write_json(json{{"measured_flux", flux},
                    {"expected_flux", expected},
                    {"expected_magnitude_per_hole", per_hole},
                    {"hole_count", cfg.holes.size()},
                    {"relative_error", std::abs(flux - expected) / std::abs(expected)},
                    {"tail_bound_relative", tail},
                    {"config_hash", cfg.config_hash}},
               out_dir / "flux_report.json");

    const vsense::LiouvilleReport liouville = vsense::liouville_residual(vortex, cfg.grid);
    write_json(json{{"median_abs_residual_normalized", liouville.median_abs_normalized},
                    {"max_density", liouville.max_density},
                    {"unmasked_cells", liouville.mask.count()},
                    {"config_hash", cfg.config_hash}},
               out_dir / "liouville_report.json");
    return 0;
}

int cmd_sense(const fs::path& image_path, const fs::path& config_path, const fs::path& out_path,
              const fs::path& snapshot_dir, const fs::path& csv_path, const Overrides& over) {
    const RunConfig cfg = parse_config(config_path, over);
    const vsense::ImageRaster image = vsense::load_image(image_path);
    const vsense::PolarizationMap pol =
        vsense::to_polarization(image, cfg.grid, cfg.gain, cfg.mode);

    vsense::HoleLattice lattice{cfg.holes, cfg.core_radius, cfg.window_radius};
    for (std::size_t i = 0; i < cfg.holes.size(); ++i)
        for (std::size_t k = i + 1; k < cfg.holes.size(); ++k)
            if (std::abs(cfg.holes[i] - cfg.holes[k]) <= 2.0 * cfg.window_radius)
                std::cerr << "warning: holes " << i << " and " << k
                          << " are closer than twice the window radius\n";

    const vsense::SensorConfig sensor{cfg.constants, cfg.winding, cfg.helicity, cfg.t_sample};
    vsense::SensorFeatures features = vsense::extract_features(pol, lattice, sensor);

    features.image_id = vsense::fnv1a_hex(file_bytes(image_path));
    json lattice_doc = json::array();
    for (const auto& c : lattice.centers) lattice_doc.push_back({c.real(), c.imag()});
    features.lattice_id = vsense::fnv1a_hex(
        json{{"centers", lattice_doc},
             {"core_radius", lattice.core_radius},
             {"window_radius", lattice.window_radius}}
            .dump());
    features.config_hash = cfg.config_hash;
    vsense::write_features(features, out_path);
    if (!csv_path.empty()) vsense::write_features_csv(features, csv_path);

    if (!snapshot_dir.empty()) {
        fs::create_directories(snapshot_dir);
        const double h = cfg.grid.hx();
        const int m = std::max(16, static_cast<int>(std::lround(2.0 * cfg.window_radius / h)));
        for (std::size_t jh = 0; jh < features.holes.size(); ++jh) {
            const auto& hole = features.holes[jh];
            const vsense::GridSpec sub(cfg.window_radius, cfg.window_radius, m, m);
            const vsense::VortexConfiguration single(
                {vsense::HoleSpec{hole.center, cfg.core_radius}}, cfg.winding, cfg.helicity,
                cfg.constants);
            vsense::ScalarField snap(sub);
            if (hole.omega_b == 0.0) {
                for (int iy = 0; iy < sub.ny; ++iy)
                    for (int ix = 0; ix < sub.nx; ++ix)
                        snap.at(ix, iy) = vsense::charge_density_at(
                            single, hole.center.real() + sub.x(ix),
                            hole.center.imag() + sub.y(iy));
            } else {
                const vsense::EvolvedState state{
                    single, vsense::BackgroundDrive{hole.omega_b, hole.center},
                    cfg.t_sample * M_PI / std::abs(hole.omega_b)};
                for (int iy = 0; iy < sub.ny; ++iy)
                    for (int ix = 0; ix < sub.nx; ++ix) {
                        const vsense::Complex v = vsense::evolve_at(
                            state, hole.center.real() + sub.x(ix),
                            hole.center.imag() + sub.y(iy));
                        snap.at(ix, iy) = std::norm(v);
                    }
            }
            char name[32];
            std::snprintf(name, sizeof(name), "hole_%02zu", jh);
            vsense::write_csv(snap, snapshot_dir / (std::string(name) + "_density.csv"));
            write_density_pgm(snap, snapshot_dir / (std::string(name) + "_density.pgm"));
        }
    }
    return 0;
}

vsense::Normalization parse_normalization(const std::string& name) {
    if (name == "none") return vsense::Normalization::none;
    if (name == "zscore") return vsense::Normalization::zscore;
    throw vsense::ConfigError("unknown normalization '" + name + "'");
}

vsense::Pattern pattern_from_input(const fs::path& path, vsense::Normalization norm) {
    const json j = read_json_input(path);
    if (j.contains("holes")) {
        const vsense::SensorFeatures features = j.get<vsense::SensorFeatures>();
        return vsense::features_to_vector(features, norm);
    }
    if (j.contains("data")) {
        const auto& data = j.at("data");
        if (data.size() % 2 != 0)
            throw vsense::IoError("pattern data must interleave re,im in " + path.string());
        vsense::Pattern p(data.size() / 2);
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = vsense::Complex(data.at(2 * i).get<double>(), data.at(2 * i + 1).get<double>());
        return p;
    }
    throw vsense::IoError("input " + path.string() + " holds neither features nor pattern data");
}

int cmd_store(const fs::path& features_path, const std::string& label, const fs::path& memory_path,
              const std::string& normalization) {
    const vsense::Normalization norm = parse_normalization(normalization);
    const vsense::Pattern pattern = pattern_from_input(features_path, norm);
    vsense::PatternMemory memory;
    if (fs::exists(memory_path)) memory = vsense::PatternMemory::load(memory_path);
    memory.store(pattern, label).save(memory_path);
    return 0;
}

int cmd_recall(const fs::path& input_path, const fs::path& memory_path, const fs::path& out_path,
               const std::string& normalization) {
    const vsense::Normalization norm = parse_normalization(normalization);
    const vsense::Pattern input = pattern_from_input(input_path, norm);
    const vsense::PatternMemory memory = vsense::PatternMemory::load(memory_path);
    const vsense::RecallResult result = vsense::recall(memory, input);

    json output = json::array();
    for (const auto& v : result.output) {
        output.push_back(v.real());
        output.push_back(v.imag());
    }
    write_json(json{{"schema_version", 1},
                    {"winner_index", result.winner_index},
                    {"winner_label", result.winner_label},
                    {"overlap", result.overlap},
                    {"runner_up_index", result.runner_up_index},
                    {"runner_up_label", result.runner_up_label},
                    {"runner_up_overlap", result.runner_up_overlap},
                    {"ambiguous", result.ambiguous},
                    {"output", output}},
               out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vortex edge-current image sensor simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, image_path, snapshot_dir, csv_path;
    std::string features_path, memory_path, input_path, label;
    std::string normalization = "none";

    Overrides over;
    const auto add_physics_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--kappa", over.kappa, "override physics.kappa");
        cmd->add_option("--winding", over.winding, "override physics.winding");
        cmd->add_option("--helicity", over.helicity, "override physics.helicity");
        cmd->add_option("--core-radius", over.core_radius, "override physics.core_radius");
    };

    CLI::App* soliton = app.add_subcommand("soliton", "compute vortex fields and reports");
    soliton->add_option("--config", config_path, "run configuration (JSON)")->required();
    soliton->add_option("--out", out_path, "output directory")->required();
    add_physics_overrides(soliton);

    CLI::App* sense = app.add_subcommand("sense", "image to per-hole features");
    sense->add_option("--image", image_path, "input image (PGM P2/P5 or CSV)")->required();
    sense->add_option("--config", config_path, "run configuration (JSON)")->required();
    sense->add_option("--out", out_path, "output features (JSON)")->required();
    sense->add_option("--snapshot-dir", snapshot_dir, "write per-hole density snapshots");
    sense->add_option("--csv", csv_path, "also write the feature matrix as CSV (rows = holes)");
    add_physics_overrides(sense);
    sense->add_option("--gain", over.gain, "override sensor.gain");
    sense->add_option("--t-sample", over.t_sample, "override sensor.t_sample");
    sense->add_option("--window-radius", over.window_radius, "override sensor.window_radius");

    CLI::App* store = app.add_subcommand("store", "store a pattern in a memory file");
    store->add_option("--features", features_path, "features document (JSON)")->required();
    store->add_option("--label", label, "pattern label")->required();
    store->add_option("--memory", memory_path, "memory file (JSON, created if missing)")
        ->required();
    store->add_option("--normalization", normalization, "none|zscore");

    CLI::App* recall = app.add_subcommand("recall", "recall the closest stored pattern");
    recall->add_option("--input", input_path, "features or raw pattern (JSON)")->required();
    recall->add_option("--memory", memory_path, "memory file (JSON)")->required();
    recall->add_option("--out", out_path, "recall report (JSON)")->required();
    recall->add_option("--normalization", normalization, "none|zscore");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (soliton->parsed()) return cmd_soliton(config_path, out_path, over);
        if (sense->parsed())
            return cmd_sense(image_path, config_path, out_path, snapshot_dir, csv_path, over);
        if (store->parsed()) return cmd_store(features_path, label, memory_path, normalization);
        if (recall->parsed()) return cmd_recall(input_path, memory_path, out_path, normalization);
    } catch (const vsense::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vsense::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical domain error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
