#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

#include "json.hpp"

#include "vsense/memory.hpp"
#include "vsense/sensor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() { return std::getenv("VSENSE_BIN"); }

int run(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " 2>cli_stderr.log";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    const fs::path dir = fs::current_path() / "cli_test_tmp";
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json soliton_config() {
    return json{{"physics", {{"kappa", 1.0}, {"winding", 2}, {"helicity", 1}, {"core_radius", 1.0}}},
                {"grid", {{"half_extent_x", 8.0}, {"half_extent_y", 8.0}, {"nx", 128}, {"ny", 128}}},
                {"holes", {{0.0, 0.0}}}};
}

json sensor_config() {
    json cfg = soliton_config();
    cfg["physics"]["kappa"] = -1.0;
    cfg["physics"]["core_radius"] = 0.4;
    cfg["holes"] = {{-4.5, 0.0}, {-1.5, 0.0}, {1.5, 0.0}, {4.5, 0.0}};
    cfg["sensor"] = {{"gain", 0.2},
                     {"mode", "unipolar"},
                     {"window_radius", 1.25},
                     {"t_sample", 0.25}};
    return cfg;
}

std::string ramp_pgm(int w, int h) {
    std::ostringstream ss;
    ss << "P2\n" << w << " " << h << "\n255\n";
    for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) ss << (255 * px / (w - 1)) << (px + 1 < w ? " " : "");
        ss << "\n";
    }
    return ss.str();
}

}  // namespace

TEST_CASE("cli: soliton command writes fields and reports") {
    REQUIRE(cli_path() != nullptr);
    const fs::path dir = work_dir();
    write_text(dir / "config.json", soliton_config().dump(2));

    const int rc = run("soliton --config " + (dir / "config.json").string() + " --out " +
                       (dir / "out_a").string());
    REQUIRE(rc == 0);
    for (const char* name : {"density.csv", "density.pgm", "density.pgm.json", "current_x.csv",
                             "current_y.csv", "flux_report.json", "liouville_report.json"})
        REQUIRE(fs::exists(dir / "out_a" / name));

    const json flux = json::parse(read_bytes(dir / "out_a" / "flux_report.json"));
    CHECK(flux.at("relative_error").get<double>() < 0.01);
    CHECK(flux.at("measured_flux").get<double>() < 0.0);  // kappa > 0
    const json liouville = json::parse(read_bytes(dir / "out_a" / "liouville_report.json"));
    CHECK(liouville.at("median_abs_residual_normalized").get<double>() < 1e-3);
}

TEST_CASE("cli: identical soliton runs are byte identical") {
    REQUIRE(cli_path() != nullptr);
    const fs::path dir = work_dir();
    write_text(dir / "config.json", soliton_config().dump(2));
    REQUIRE(run("soliton --config " + (dir / "config.json").string() + " --out " +
                (dir / "rep_1").string()) == 0);
    REQUIRE(run("soliton --config " + (dir / "config.json").string() + " --out " +
                (dir / "rep_2").string()) == 0);
    for (const auto& entry : fs::directory_iterator(dir / "rep_1")) {
        const auto name = entry.path().filename();
        REQUIRE(read_bytes(entry.path()) == read_bytes(dir / "rep_2" / name));
    }
}

TEST_CASE("cli: error classes map to distinct exit codes") {
    REQUIRE(cli_path() != nullptr);
    const fs::path dir = work_dir();

    // usage error: unknown subcommand / missing required option
    CHECK(run("frobnicate") == 2);
    CHECK(run("soliton") == 2);
    // config error: missing config file
    CHECK(run("soliton --config " + (dir / "nope.json").string() + " --out " +
              (dir / "x").string()) == 2);

    write_text(dir / "sense_config.json", sensor_config().dump(2));
    write_text(dir / "ramp.pgm", ramp_pgm(96, 96));
    write_text(dir / "broken.pgm", "P9\n2 2\n255\n0 0 0 0\n");

    // io error: malformed image
    CHECK(run("sense --image " + (dir / "broken.pgm").string() + " --config " +
              (dir / "sense_config.json").string() + " --out " + (dir / "f.json").string()) == 3);

    // numerical domain error: singular sample time
    json singular = sensor_config();
    singular["sensor"]["t_sample"] = 0.5;
    write_text(dir / "singular.json", singular.dump(2));
    CHECK(run("sense --image " + (dir / "ramp.pgm").string() + " --config " +
              (dir / "singular.json").string() + " --out " + (dir / "f.json").string()) == 4);
}

TEST_CASE("cli: sense, store, recall round trip") {
    REQUIRE(cli_path() != nullptr);
    const fs::path dir = work_dir();
    write_text(dir / "sense_config.json", sensor_config().dump(2));
    write_text(dir / "ramp.pgm", ramp_pgm(96, 96));
    write_text(dir / "blank.pgm", "P2\n4 4\n255\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
    write_text(dir / "bright.pgm", "P2\n4 4\n255\n255 255 255 255\n255 255 255 255\n"
                                   "255 255 255 255\n255 255 255 255\n");

    REQUIRE(run("sense --image " + (dir / "ramp.pgm").string() + " --config " +
                (dir / "sense_config.json").string() + " --out " + (dir / "ramp.json").string() +
                " --snapshot-dir " + (dir / "snaps").string()) == 0);
    REQUIRE(fs::exists(dir / "snaps" / "hole_00_density.csv"));
    REQUIRE(fs::exists(dir / "snaps" / "hole_03_density.pgm.json"));

    const vsense::SensorFeatures ramp_features = vsense::read_features(dir / "ramp.json");
    REQUIRE(ramp_features.holes.size() == 4);
    for (std::size_t j = 1; j < 4; ++j)
        CHECK(ramp_features.holes[j].omega_b > ramp_features.holes[j - 1].omega_b);
    CHECK(!ramp_features.image_id.empty());
    CHECK(!ramp_features.config_hash.empty());

    REQUIRE(run("sense --image " + (dir / "bright.pgm").string() + " --config " +
                (dir / "sense_config.json").string() + " --out " + (dir / "bright.json").string() +
                " --csv " + (dir / "bright.csv").string()) == 0);
    // uniform image: identical feature rows
    const vsense::SensorFeatures bright = vsense::read_features(dir / "bright.json");
    for (std::size_t j = 1; j < bright.holes.size(); ++j) {
        CHECK(bright.holes[j].omega_b == bright.holes[0].omega_b);
        CHECK(bright.holes[j].q_moment == bright.holes[0].q_moment);
        CHECK(bright.holes[j].energy == bright.holes[0].energy);
    }
    {
        std::ifstream csv(dir / "bright.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "index,center_x,center_y,omega_b,q_moment,energy");
        int rows = 0;
        for (std::string line; std::getline(csv, line);) ++rows;
        CHECK(rows == 4);
    }

    // blank image: zero omega/energy columns
    REQUIRE(run("sense --image " + (dir / "blank.pgm").string() + " --config " +
                (dir / "sense_config.json").string() + " --out " +
                (dir / "blank.json").string()) == 0);
    const vsense::SensorFeatures blank = vsense::read_features(dir / "blank.json");
    for (const auto& h : blank.holes) {
        CHECK(h.omega_b == 0.0);
        CHECK(h.energy == 0.0);
    }

    fs::remove(dir / "memory.json");
    REQUIRE(run("store --features " + (dir / "ramp.json").string() + " --label ramp --memory " +
                (dir / "memory.json").string()) == 0);
    REQUIRE(run("store --features " + (dir / "bright.json").string() +
                " --label bright --memory " + (dir / "memory.json").string()) == 0);
    // duplicate label rejected
    CHECK(run("store --features " + (dir / "ramp.json").string() + " --label ramp --memory " +
              (dir / "memory.json").string()) == 2);

    REQUIRE(run("recall --input " + (dir / "ramp.json").string() + " --memory " +
                (dir / "memory.json").string() + " --out " + (dir / "recall.json").string()) == 0);
    const json report = json::parse(read_bytes(dir / "recall.json"));
    CHECK(report.at("winner_label").get<std::string>() == "ramp");
    CHECK(report.at("overlap").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(report.at("ambiguous").get<bool>());

    // recall agrees with a brute-force scan over the stored patterns
    const vsense::PatternMemory memory = vsense::PatternMemory::load(dir / "memory.json");
    const auto input = vsense::features_to_vector(ramp_features, vsense::Normalization::none);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const double mag = std::abs(vsense::pattern_dot(memory.pattern(k).data, input));
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    CHECK(report.at("winner_index").get<std::size_t>() == best);

    // raw pattern input with an exact tie sets the ambiguity flag
    const json tie_input{{"data", {M_SQRT1_2, 0.0, M_SQRT1_2, 0.0}}};
    vsense::PatternMemory basis_memory;
    basis_memory = basis_memory.store({vsense::Complex(1.0, 0.0), vsense::Complex(0.0, 0.0)}, "x");
    basis_memory = basis_memory.store({vsense::Complex(0.0, 0.0), vsense::Complex(1.0, 0.0)}, "y");
    basis_memory.save(dir / "basis_memory.json");
    write_text(dir / "tie.json", tie_input.dump(2));
    REQUIRE(run("recall --input " + (dir / "tie.json").string() + " --memory " +
                (dir / "basis_memory.json").string() + " --out " +
                (dir / "tie_report.json").string()) == 0);
    const json tie_report = json::parse(read_bytes(dir / "tie_report.json"));
    CHECK(tie_report.at("ambiguous").get<bool>());
    CHECK(tie_report.at("winner_label").get<std::string>() == "x");

    // byte-identical reruns for sense / store / recall
    REQUIRE(run("sense --image " + (dir / "ramp.pgm").string() + " --config " +
                (dir / "sense_config.json").string() + " --out " +
                (dir / "ramp_again.json").string()) == 0);
    CHECK(read_bytes(dir / "ramp.json") == read_bytes(dir / "ramp_again.json"));

    REQUIRE(run("recall --input " + (dir / "ramp.json").string() + " --memory " +
                (dir / "memory.json").string() + " --out " +
                (dir / "recall_again.json").string()) == 0);
    CHECK(read_bytes(dir / "recall.json") == read_bytes(dir / "recall_again.json"));
}

TEST_CASE("cli: flag overrides take precedence over the config document") {
    REQUIRE(cli_path() != nullptr);
    const fs::path dir = work_dir();
    write_text(dir / "config.json", soliton_config().dump(2));
    REQUIRE(run("soliton --config " + (dir / "config.json").string() + " --out " +
                (dir / "ov").string() + " --kappa -1.0") == 0);
    const json flux = json::parse(read_bytes(dir / "ov" / "flux_report.json"));
    CHECK(flux.at("measured_flux").get<double>() > 0.0);  // sign flipped by the override
    // invalid override value maps to the config error class
    CHECK(run("soliton --config " + (dir / "config.json").string() + " --out " +
              (dir / "ov2").string() + " --winding 1") == 2);
}

TEST_CASE("cli: empty memory recall fails cleanly") {
    REQUIRE(cli_path() != nullptr);
    const fs::path dir = work_dir();
    const json empty{{"schema_version", 1}, {"dimension", 2}, {"patterns", json::array()}};
    write_text(dir / "empty_memory.json", empty.dump(2));
    const json input{{"data", {1.0, 0.0, 0.0, 0.0}}};
    write_text(dir / "input.json", input.dump(2));
    CHECK(run("recall --input " + (dir / "input.json").string() + " --memory " +
              (dir / "empty_memory.json").string() + " --out " + (dir / "r.json").string()) == 2);
}
