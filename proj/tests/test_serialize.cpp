#include <doctest.h>

#include <random>

#include "nadid/serialize.hpp"
#include "oracles.hpp"

using namespace nadid;
using nlohmann::json;

TEST_CASE("capacity JSON roundtrip preserves representation and values") {
    std::mt19937_64 rng(3030);

    const auto table = oracles::random_monotone_table(3, rng);
    const Capacity expl = make_explicit_capacity(GroundSet::indexed(3), table, true);
    const Capacity expl_back = capacity_from_json(capacity_to_json(expl));
    CHECK(expl_back.is_explicit());
    CHECK(expl_back.ground() == expl.ground());
    CHECK(expl_back.normalized());
    for (Mask mask = 0; mask < 8; ++mask) {
        CHECK(expl_back.value(mask) == expl.value(mask));  // JSON doubles round-trip
    }

    std::vector<double> coeffs{0.0, 0.4, 0.35, 0.25};
    const Capacity mob = make_mobius_capacity(GroundSet::indexed(2), coeffs, true);
    const Capacity mob_back = capacity_from_json(capacity_to_json(mob));
    CHECK(mob_back.is_mobius());
    for (Mask mask = 0; mask < 4; ++mask) {
        CHECK(mob_back.value(mask) == mob.value(mask));
    }

    const Capacity sig =
        make_sigmoid_capacity(GroundSet::from_periods({12, 13, 14}), {5.0, 0.5}, Anchor::raw);
    const Capacity sig_back = capacity_from_json(capacity_to_json(sig));
    CHECK(sig_back.is_distorted());
    CHECK_FALSE(sig_back.normalized());
    CHECK(sig_back.ground().labels()[0] == "12");
    for (Mask mask = 0; mask < 8; ++mask) {
        CHECK(sig_back.value(mask) == sig.value(mask));
    }

    const Capacity uni = make_uniform_capacity(GroundSet::indexed(4));
    const Capacity uni_back = capacity_from_json(capacity_to_json(uni));
    CHECK(uni_back.value(0b0011) == 0.5);
}

TEST_CASE("capacity JSON uses decimal bitmask keys") {
    const Capacity cap =
        make_explicit_capacity(GroundSet::indexed(2), {0.0, 0.25, 0.5, 1.0}, true);
    const json j = capacity_to_json(cap);
    CHECK(j["representation"] == "explicit");
    CHECK(j["values"]["1"] == 0.25);
    CHECK(j["values"]["2"] == 0.5);
    CHECK(j["n"] == 2);
}

TEST_CASE("malformed capacity JSON is rejected with specifics") {
    json j;
    j["n"] = 2;
    j["labels"] = {"1", "2"};
    j["representation"] = "explicit";
    j["values"] = {{"0", 0.0}, {"1", 0.2}, {"2", 0.4}};  // missing subset 3
    CHECK_THROWS_AS(capacity_from_json(j), ValidationError);

    j["values"] = {{"0", 0.0}, {"1", 0.2}, {"2", 0.4}, {"7", 1.0}};  // out of range
    CHECK_THROWS_AS(capacity_from_json(j), ValidationError);

    j["representation"] = "wavelet";
    CHECK_THROWS_AS(capacity_from_json(j), ValidationError);

    CHECK_THROWS_AS(capacity_from_json(json::array()), ValidationError);
}
