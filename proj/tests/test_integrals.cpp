#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nadid/integrals.hpp"
#include "oracles.hpp"

using namespace nadid;

namespace {
constexpr double kSigmoidAtOne = 0.9241418199787566;

double raw_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-5.0 * (x - 0.5))); }
}  // namespace

TEST_CASE("choquet hand examples") {
    const GroundSet g2 = GroundSet::indexed(2);
    // nu({2}) = 0.7 where element 2 carries the larger value.
    const Capacity cap = make_explicit_capacity(g2, {0.0, 0.3, 0.7, 1.0}, true);
    const ValuedFunction f(g2, {0.2, 0.5});
    CHECK(choquet(f, cap) == doctest::Approx(0.41).epsilon(1e-15));

    // Constant function integrates to the constant under a normalized capacity.
    const ValuedFunction c(g2, {0.37, 0.37});
    CHECK(choquet(c, cap) == doctest::Approx(0.37).epsilon(1e-15));

    // Reduction to the arithmetic mean under the uniform additive capacity.
    const GroundSet g4 = GroundSet::indexed(4);
    const ValuedFunction ramp(g4, {1.0, 2.0, 3.0, 4.0});
    CHECK(choquet(ramp, make_uniform_capacity(g4)) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("choquet rejects mismatched ground sets") {
    const ValuedFunction f(GroundSet::indexed(2), {0.1, 0.2});
    const Capacity cap = make_uniform_capacity(GroundSet::indexed(3));
    CHECK_THROWS_AS(choquet(f, cap), ValidationError);
    CHECK_THROWS_AS(ValuedFunction(GroundSet::indexed(2),
                                   {0.1, std::numeric_limits<double>::quiet_NaN()}),
                    ValidationError);
}

TEST_CASE("choquet_listing replicates the replication arithmetic") {
    // f = [0.1, 0.1]: 0.1*g(1/2) + 0.1*(g(1) - g(1/2)).
    CHECK(choquet_listing({0.1, 0.1}, raw_sigmoid) ==
          doctest::Approx(0.09241418199787566).epsilon(1e-15));
    CHECK(choquet_listing({0.0, 0.0}, raw_sigmoid) == 0.0);
    // Equal values d give d*g(1), not d: the listing form is not translative.
    const double d = 0.25;
    CHECK(choquet_listing({d, d}, raw_sigmoid) ==
          doctest::Approx(d * kSigmoidAtOne).epsilon(1e-14));
    CHECK(choquet_listing({d, d}, raw_sigmoid) != doctest::Approx(d).epsilon(1e-3));
}

TEST_CASE("sugeno hand examples") {
    const GroundSet g2 = GroundSet::indexed(2);
    const Capacity uniform = make_uniform_capacity(g2);
    CHECK(sugeno(ValuedFunction(g2, {0.3, 0.8}), uniform) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sugeno(ValuedFunction(g2, {0.6, 0.6}), uniform) ==
          doctest::Approx(0.6).epsilon(1e-15));
    const GroundSet g5 = GroundSet::indexed(5);
    CHECK(sugeno(ValuedFunction(g5, {0, 0, 0, 0, 0}), make_uniform_capacity(g5)) == 0.0);
}

TEST_CASE("choquet matches the level-set oracle exactly") {
    std::mt19937_64 rng(707);
    for (int rep = 0; rep < 300; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const auto table = oracles::random_monotone_table(n, rng);
        const Capacity cap = make_explicit_capacity(GroundSet::indexed(n), table, true);
        auto f = oracles::random_vector(n, rng, -2.0, 2.0);
        if (rep % 3 == 0 && n >= 2) f[1] = f[0];  // exercise ties
        const double lib = choquet(ValuedFunction(GroundSet::indexed(n), f), cap);
        CHECK(std::abs(lib - oracles::choquet_level_sets(f, table)) <= 1e-12);
        // Second independent route: Möbius minimum form.
        const auto mobius = oracles::mobius_inclusion_exclusion(table, n);
        CHECK(std::abs(lib - oracles::choquet_mobius_min(f, mobius)) <= 1e-10);
    }
}

TEST_CASE("choquet properties: monotone, translative, homogeneous, additive") {
    std::mt19937_64 rng(808);
    for (int rep = 0; rep < 250; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const GroundSet ground = GroundSet::indexed(n);
        const auto table = oracles::random_monotone_table(n, rng);
        const Capacity cap = make_explicit_capacity(ground, table, true);
        const auto f = oracles::random_vector(n, rng, -1.0, 1.0);

        // Monotonicity: g >= f pointwise.
        auto g = f;
        for (auto& v : g) v += std::abs(0.5 * v) + 0.1;
        CHECK(choquet(ValuedFunction(ground, f), cap) <=
              choquet(ValuedFunction(ground, g), cap) + 1e-14);

        // Translation covariance for normalized capacities.
        std::uniform_real_distribution<double> shift(-2.0, 2.0);
        const double c = shift(rng);
        auto shifted = f;
        for (auto& v : shifted) v += c;
        CHECK(std::abs(choquet(ValuedFunction(ground, shifted), cap) -
                       (choquet(ValuedFunction(ground, f), cap) + c)) <= 1e-12);

        // Positive homogeneity.
        std::uniform_real_distribution<double> scale(0.0, 3.0);
        const double a = scale(rng);
        auto scaled = f;
        for (auto& v : scaled) v *= a;
        CHECK(std::abs(choquet(ValuedFunction(ground, scaled), cap) -
                       a * choquet(ValuedFunction(ground, f), cap)) <= 1e-12);

        // Additive reduction: weighted mean under an additive capacity.
        const auto weights = oracles::random_vector(n, rng, 0.05, 1.0);
        const auto add_table = oracles::additive_table(weights);
        const Capacity additive = make_explicit_capacity(ground, add_table, true);
        double expected = 0.0;
        for (int i = 0; i < n; ++i) {
            expected += f[static_cast<std::size_t>(i)] * add_table[std::size_t{1} << i];
        }
        CHECK(std::abs(choquet(ValuedFunction(ground, f), additive) - expected) <= 1e-12);
    }
}

TEST_CASE("tie handling is value-irrelevant") {
    std::mt19937_64 rng(909);
    const int n = 5;
    const GroundSet ground = GroundSet::indexed(n);
    for (int rep = 0; rep < 100; ++rep) {
        const auto table = oracles::random_monotone_table(n, rng);
        const Capacity cap = make_explicit_capacity(ground, table, true);
        auto f = oracles::random_vector(n, rng, 0.0, 1.0);
        f[2] = f[0];
        f[4] = f[0];  // three-way tie

        const double lib = choquet(ValuedFunction(ground, f), cap);
        CHECK(std::abs(lib - oracles::choquet_level_sets(f, table)) <= 1e-12);

        // Reversed tie-break: sort by value then by descending index.
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (f[a] != f[b]) return f[a] < f[b];
            return a > b;
        });
        double total = 0.0;
        double prev = 0.0;
        Mask upper = ground.full_mask();
        for (int idx : order) {
            total += (f[idx] - prev) * cap.value(upper);
            prev = f[idx];
            upper &= ~(Mask{1} << idx);
        }
        CHECK(std::abs(lib - total) <= 1e-14);

        // choquet_listing only sees the sorted multiset, so permuting equal
        // values cannot change it either.
        auto permuted = f;
        std::swap(permuted[0], permuted[2]);
        CHECK(choquet_listing(f, raw_sigmoid) == choquet_listing(permuted, raw_sigmoid));
    }
}

TEST_CASE("sugeno against exhaustive definition and edge shapes") {
    std::mt19937_64 rng(1010);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const GroundSet ground = GroundSet::indexed(n);
        const auto table = oracles::random_monotone_table(n, rng);
        const Capacity cap = make_explicit_capacity(ground, table, true);
        const auto f = oracles::random_vector(n, rng, 0.0, 1.0);
        // Direct max-min over all non-empty subsets.
        double expected = -1.0;
        for (std::size_t mask = 1; mask < table.size(); ++mask) {
            double lo = 2.0;
            for (int i = 0; i < n; ++i) {
                if (mask & (std::size_t{1} << i)) lo = std::min(lo, f[i]);
            }
            expected = std::max(expected, std::min(lo, table[mask]));
        }
        CHECK(sugeno(ValuedFunction(ground, f), cap) == doctest::Approx(expected).epsilon(1e-15));
    }
    CHECK_THROWS_AS(sugeno(ValuedFunction(GroundSet::indexed(21),
                                          std::vector<double>(21, 0.5)),
                           make_uniform_capacity(GroundSet::indexed(21))),
                    ValidationError);
}
