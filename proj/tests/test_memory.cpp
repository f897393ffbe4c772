#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "vsense/errors.hpp"
#include "vsense/memory.hpp"

using namespace vsense;
namespace fs = std::filesystem;

namespace {

Pattern basis(std::size_t dim, std::size_t k) {
    Pattern p(dim, Complex{0.0, 0.0});
    p[k] = Complex{1.0, 0.0};
    return p;
}

Pattern random_pattern(std::size_t dim, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Pattern p(dim);
    for (auto& v : p) v = Complex(dist(rng), dist(rng));
    return p;
}

// Gram-Schmidt, for orthonormal stored sets.
std::vector<Pattern> orthonormal_set(std::size_t dim, std::size_t count, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<Pattern> set;
    while (set.size() < count) {
        Pattern cand = random_pattern(dim, rng);
        for (const auto& prev : set) {
            const Complex c = pattern_dot(prev, cand);
            for (std::size_t i = 0; i < dim; ++i) cand[i] -= c * prev[i];
        }
        const double n = pattern_norm(cand);
        if (n < 1e-6) continue;
        for (auto& v : cand) v /= n;
        set.push_back(std::move(cand));
    }
    return set;
}

}  // namespace

TEST_CASE("store: normalization, ordering, and rejection rules") {
    PatternMemory memory;
    memory = memory.store({Complex(3.0, 0.0), Complex(0.0, 4.0)}, "a");
    CHECK(memory.size() == 1);
    CHECK(pattern_norm(memory.pattern(0).data) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(memory.pattern(0).data[0] == Complex(0.6, 0.0));

    memory = memory.store(basis(2, 1), "b");
    memory = memory.store(basis(2, 0), "c");
    REQUIRE(memory.size() == 3);
    CHECK(memory.pattern(1).label == "b");
    CHECK(memory.pattern(2).label == "c");

    CHECK_THROWS_AS((void)memory.store(basis(2, 0), "b"), ConfigError);          // duplicate label
    CHECK_THROWS_AS((void)memory.store(basis(3, 0), "d"), ConfigError);          // dimension mismatch
    CHECK_THROWS_AS((void)memory.store(Pattern(2, Complex{}), "e"), ConfigError);  // zero pattern
    CHECK_THROWS_AS((void)memory.store(Pattern{}, "f"), ConfigError);            // empty
}

TEST_CASE("green_apply: projector onto the span of an orthonormal memory") {
    PatternMemory memory;
    memory = memory.store(basis(4, 0), "e1");
    memory = memory.store(basis(4, 1), "e2");

    const Pattern in = basis(4, 1);
    CHECK(green_apply(memory, in) == in);

    const Pattern ortho = basis(4, 3);
    for (const auto& v : green_apply(memory, ortho)) REQUIRE(v == Complex{0.0, 0.0});

    Pattern mix(4, Complex{});
    mix[0] = Complex(0.6, 0.0);
    mix[1] = Complex(0.8, 0.0);
    const Pattern out = green_apply(memory, mix);
    CHECK(std::abs(out[0] - Complex(0.6, 0.0)) < 1e-15);
    CHECK(std::abs(out[1] - Complex(0.8, 0.0)) < 1e-15);

    CHECK_THROWS_AS(green_apply(PatternMemory{}, in), ConfigError);
}

TEST_CASE("green_apply: idempotent on orthonormal memories, linear always") {
    const auto set = orthonormal_set(16, 5, 42);
    PatternMemory memory;
    for (std::size_t k = 0; k < set.size(); ++k)
        memory = memory.store(set[k], "p" + std::to_string(k));

    std::mt19937 rng(7);
    const Pattern in = random_pattern(16, rng);
    const Pattern once = green_apply(memory, in);
    const Pattern twice = green_apply(memory, once);
    for (std::size_t i = 0; i < once.size(); ++i)
        REQUIRE(std::abs(twice[i] - once[i]) < 1e-10);

    const Pattern in2 = random_pattern(16, rng);
    Pattern combo(16);
    const Complex alpha(0.3, -1.1), beta(-0.8, 0.2);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = alpha * in[i] + beta * in2[i];
    const Pattern lhs = green_apply(memory, combo);
    const Pattern g2 = green_apply(memory, in2);
    for (std::size_t i = 0; i < combo.size(); ++i)
        REQUIRE(std::abs(lhs[i] - (alpha * once[i] + beta * g2[i])) < 1e-12);
}

TEST_CASE("recall: exact patterns, projections, ties") {
    PatternMemory memory;
    memory = memory.store(basis(3, 0), "e1");
    memory = memory.store(basis(3, 1), "e2");

    const RecallResult exact = recall(memory, basis(3, 1));
    CHECK(exact.winner_index == 1);
    CHECK(exact.winner_label == "e2");
    CHECK(exact.overlap == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(exact.ambiguous);
    CHECK(std::abs(exact.output[1] - Complex(1.0, 0.0)) < 1e-15);

    Pattern mix(3, Complex{});
    mix[0] = Complex(0.6, 0.0);
    mix[1] = Complex(0.8, 0.0);
    const RecallResult proj = recall(memory, mix);
    CHECK(proj.winner_index == 1);
    CHECK(proj.overlap == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(proj.runner_up_overlap == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(proj.runner_up_label == "e1");
    CHECK_FALSE(proj.ambiguous);
    CHECK(std::abs(proj.output[1] - Complex(0.8, 0.0)) < 1e-15);
    CHECK(std::abs(proj.output[0]) == 0.0);
    CHECK(proj.overlap >= proj.runner_up_overlap);

    Pattern tie(3, Complex{});
    tie[0] = Complex(M_SQRT1_2, 0.0);
    tie[1] = Complex(M_SQRT1_2, 0.0);
    const RecallResult tied = recall(memory, tie);
    CHECK(tied.ambiguous);
    CHECK(tied.winner_index == 0);  // lowest index wins the tie

    CHECK_THROWS_AS(recall(memory, Pattern(3, Complex{})), ConfigError);
    CHECK_THROWS_AS(recall(PatternMemory{}, mix), ConfigError);
    CHECK_THROWS_AS(recall(memory, basis(5, 0)), ConfigError);
}

TEST_CASE("recall: winner invariant under global scale and phase") {
    const auto set = orthonormal_set(12, 4, 5);
    PatternMemory memory;
    for (std::size_t k = 0; k < set.size(); ++k)
        memory = memory.store(set[k], "p" + std::to_string(k));

    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const Pattern in = random_pattern(12, rng);
        const RecallResult base = recall(memory, in);
        Pattern scaled(in.size());
        const Complex factor = std::polar(3.7, 1.9);
        for (std::size_t i = 0; i < in.size(); ++i) scaled[i] = factor * in[i];
        const RecallResult alt = recall(memory, scaled);
        REQUIRE(alt.winner_index == base.winner_index);
        REQUIRE(alt.overlap == doctest::Approx(base.overlap).epsilon(1e-10));
    }
}

TEST_CASE("recall: agrees with the brute-force scan oracle") {
    const auto set = orthonormal_set(24, 6, 99);
    PatternMemory memory;
    std::vector<std::vector<Complex>> raw;
    for (std::size_t k = 0; k < set.size(); ++k) {
        memory = memory.store(set[k], "p" + std::to_string(k));
        raw.push_back(memory.pattern(k).data);
    }
    std::mt19937 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const Pattern in = random_pattern(24, rng);
        REQUIRE(recall(memory, in).winner_index == oracles::brute_force_winner(raw, in));
    }
}

TEST_CASE("recall: winner beats every cross overlap of its row") {
    const auto set = orthonormal_set(10, 4, 17);
    PatternMemory memory;
    for (std::size_t k = 0; k < set.size(); ++k)
        memory = memory.store(set[k], "p" + std::to_string(k));
    const auto m = overlap_matrix(memory);
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const RecallResult r = recall(memory, memory.pattern(k).data);
        CHECK(r.winner_index == k);
        for (std::size_t j = 0; j < memory.size(); ++j)
            if (j != k) CHECK(r.overlap >= m[k][j]);
    }
}

TEST_CASE("overlap_matrix: identity for orthonormal sets, symmetric, duplicates visible") {
    const auto set = orthonormal_set(8, 3, 3);
    PatternMemory memory;
    for (std::size_t k = 0; k < set.size(); ++k)
        memory = memory.store(set[k], "p" + std::to_string(k));
    auto m = overlap_matrix(memory);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(m[j][k] == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10));
            CHECK(m[j][k] == doctest::Approx(m[k][j]).epsilon(1e-12));
        }

    memory = memory.store(set[0], "dup");
    m = overlap_matrix(memory);
    CHECK(m[0][3] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(overlap_matrix(PatternMemory{}), ConfigError);
}

TEST_CASE("memory json round trip is bit exact") {
    std::mt19937 rng(2024);
    PatternMemory memory;
    memory = memory.store(random_pattern(6, rng), "first");
    memory = memory.store(random_pattern(6, rng), "second label with spaces");

    const fs::path p = fs::temp_directory_path() / "vsense_memory_roundtrip.json";
    memory.save(p);
    const PatternMemory loaded = PatternMemory::load(p);
    REQUIRE(loaded.size() == memory.size());
    REQUIRE(loaded.dimension() == memory.dimension());
    for (std::size_t k = 0; k < memory.size(); ++k) {
        REQUIRE(loaded.pattern(k).label == memory.pattern(k).label);
        REQUIRE(loaded.pattern(k).data == memory.pattern(k).data);
    }
    CHECK_THROWS_AS(PatternMemory::load(fs::temp_directory_path() / "vsense_no_such.json"),
                    IoError);
}
