#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nadid/did.hpp"
#include "nadid/integrals.hpp"
#include "nadid/panel.hpp"
#include "oracles.hpp"

using namespace nadid;

namespace {

double raw_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-5.0 * (x - 0.5))); }

PanelRow row(const char* unit, int period, int treated, int post, double outcome) {
    return PanelRow{unit, period, treated, post, outcome};
}

/// Treated unit: pre 1.0, post 2.0. Control unit: pre 1.0, post 1.5.
PanelDataset cell_fixture() {
    return PanelDataset::from_rows({row("T1", 1, 1, 0, 1.0), row("T1", 2, 1, 1, 2.0),
                                    row("C1", 1, 0, 0, 1.0), row("C1", 2, 0, 1, 1.5)});
}

/// Both groups follow the identical path over 4 periods, treatment at 3.
PanelDataset identical_path_panel() {
    std::vector<PanelRow> rows;
    const double path[] = {1.0, 1.2, 0.9, 1.4};
    for (int unit = 0; unit < 2; ++unit) {
        for (int t = 1; t <= 4; ++t) {
            rows.push_back(row(unit == 0 ? "T" : "C", t, unit == 0 ? 1 : 0, t >= 3 ? 1 : 0,
                               path[t - 1]));
        }
    }
    return PanelDataset::from_rows(std::move(rows));
}

}  // namespace

TEST_CASE("panel invariants are enforced") {
    // Treated flips within a unit.
    CHECK_THROWS_AS(PanelDataset::from_rows(
                        {row("A", 1, 1, 0, 1.0), row("A", 2, 0, 1, 1.0)}),
                    ValidationError);
    // Post contradicts the inferred treatment start (period 2 is post, so
    // period 3 must be too).
    CHECK_THROWS_AS(PanelDataset::from_rows({row("A", 1, 1, 0, 1.0), row("A", 2, 1, 1, 1.0),
                                             row("A", 3, 1, 0, 1.0)}),
                    ValidationError);
    CHECK_THROWS_AS(PanelDataset::from_rows({}), ValidationError);

    const PanelDataset panel = cell_fixture();
    CHECK(panel.treatment_start() == 2);
    CHECK(panel.n_units() == 2);
    CHECK(panel.n_periods() == 2);
    CHECK(panel.post_periods() == std::vector<int>{2});
}

TEST_CASE("panel CSV roundtrip and column remapping") {
    const PanelDataset panel = cell_fixture();
    std::ostringstream out;
    write_panel_csv(out, panel);
    std::istringstream in(out.str());
    const PanelDataset back = read_panel_csv(in);
    REQUIRE(back.rows().size() == panel.rows().size());
    for (std::size_t i = 0; i < panel.rows().size(); ++i) {
        CHECK(back.rows()[i].unit == panel.rows()[i].unit);
        CHECK(back.rows()[i].outcome == panel.rows()[i].outcome);  // round-trip exact
    }

    std::istringstream custom("id,t,D,P,y\nu1,1,1,0,1.0\nu1,2,1,1,2.0\nc1,1,0,0,1.0\nc1,2,0,1,1.5\n");
    ColumnMap map;
    map.unit = "id";
    map.period = "t";
    map.treated = "D";
    map.post = "P";
    map.outcome = "y";
    const PanelDataset remapped = read_panel_csv(custom, map);
    CHECK(difference_table(remapped).value == doctest::Approx(0.5).epsilon(1e-15));

    std::istringstream missing("Hospital,Period,Treated,InfectionRate\n1,1,0,0.5\n");
    CHECK_THROWS_WITH_AS(read_panel_csv(missing), doctest::Contains("PostTreatment"),
                         ValidationError);
}

TEST_CASE("difference_table: fixture, null panel, both orders recorded") {
    const DidEstimate est = difference_table(cell_fixture());
    CHECK(est.value == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(est.cell_means.has_value());
    CHECK(est.cell_means->y1 == 2.0);
    CHECK(est.cell_means->y2 == 1.5);
    CHECK(est.cell_means->y3 == 1.0);
    CHECK(est.cell_means->y4 == 1.0);

    CHECK(difference_table(identical_path_panel()).value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("difference_table names an empty cell") {
    // No control/post rows: control unit observed only pre-treatment.
    CHECK_THROWS_WITH_AS(
        difference_table(PanelDataset::from_rows({row("T", 1, 1, 0, 1.0),
                                                  row("T", 2, 1, 1, 2.0),
                                                  row("C", 1, 0, 0, 1.0)})),
        doctest::Contains("control/post"), ValidationError);
}

TEST_CASE("did_ols equals the difference table") {
    const OlsCoefficients fixture = did_ols(cell_fixture());
    CHECK(fixture.delta == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fixture.alpha == doctest::Approx(1.0).epsilon(1e-12));  // control pre mean

    // Purely additive outcome (unit + period effects): delta vanishes.
    std::vector<PanelRow> rows;
    const double unit_effect[] = {0.5, 1.0, 0.25, 0.75};
    const int treated_flag[] = {1, 1, 0, 0};
    for (int i = 0; i < 4; ++i) {
        for (int t = 1; t <= 4; ++t) {
            rows.push_back(row(std::to_string(i).c_str(), t, treated_flag[i], t >= 3 ? 1 : 0,
                               unit_effect[i] + 0.125 * t));
        }
    }
    const OlsCoefficients null_fit = did_ols(PanelDataset::from_rows(std::move(rows)));
    CHECK(std::abs(null_fit.delta) <= 1e-12);

    std::mt19937_64 rng(1111);
    for (int rep = 0; rep < 50; ++rep) {
        const PanelDataset panel = oracles::random_balanced_panel(rng);
        const double dd = difference_table(panel).value;
        CHECK(std::abs(did_ols(panel).delta - dd) <= 1e-10);
    }
}

TEST_CASE("delta_series: symmetry, balanced-mean identity, degenerate horizon") {
    const DeltaSeries identical = delta_series(identical_path_panel());
    REQUIRE(identical.post_periods == std::vector<int>{3, 4});
    for (std::size_t i = 0; i < identical.post_periods.size(); ++i) {
        CHECK(identical.delta_treat[i] == doctest::Approx(identical.delta_control[i]));
    }

    std::mt19937_64 rng(1212);
    for (int rep = 0; rep < 30; ++rep) {
        const PanelDataset panel = oracles::random_balanced_panel(rng);
        const DeltaSeries series = delta_series(panel);
        double mean_gap = 0.0;
        for (std::size_t i = 0; i < series.post_periods.size(); ++i) {
            mean_gap += series.delta_treat[i] - series.delta_control[i];
        }
        mean_gap /= static_cast<double>(series.post_periods.size());
        CHECK(std::abs(mean_gap - difference_table(panel).value) <= 1e-12);
    }

    const DeltaSeries single = delta_series(cell_fixture());
    REQUIRE(single.post_periods.size() == 1);
    CHECK(single.delta_treat[0] == doctest::Approx(1.0));
    CHECK(single.delta_control[0] == doctest::Approx(0.5));

    // A group with no pre periods errors.
    CHECK_THROWS_WITH_AS(delta_series(PanelDataset::from_rows(
                             {row("T", 1, 1, 1, 1.0), row("C", 1, 0, 1, 1.0)}, 1)),
                         doctest::Contains("pre-treatment"), ValidationError);
}

TEST_CASE("did_integral: equivalences, point mass, validation") {
    std::mt19937_64 rng(1313);
    for (int rep = 0; rep < 30; ++rep) {
        const PanelDataset panel = oracles::random_balanced_panel(rng);
        const double dd = difference_table(panel).value;
        CHECK(std::abs(did_integral(panel, IntegralWeights::uniform).value - dd) <= 1e-12);
        CHECK(std::abs(did_integral(panel, IntegralWeights::count_proportional).value - dd) <=
              1e-12);
    }

    const PanelDataset panel = identical_path_panel();
    CHECK(did_integral(panel, {0.3, 0.7}).value == doctest::Approx(0.0));

    // Point mass picks out one period's difference.
    std::mt19937_64 rng2(1414);
    const PanelDataset random_panel = oracles::random_balanced_panel(rng2);
    const DeltaSeries series = delta_series(random_panel);
    std::vector<double> point(series.post_periods.size(), 0.0);
    point.back() = 1.0;
    CHECK(did_integral(random_panel, point).value ==
          doctest::Approx(series.delta_treat.back() - series.delta_control.back()));

    CHECK_THROWS_AS(did_integral(panel, {0.5, 0.2}), ValidationError);   // sums to 0.7
    CHECK_THROWS_AS(did_integral(panel, {1.0}), ValidationError);        // wrong length
    CHECK_THROWS_AS(did_integral(panel, {1.5, -0.5}), ValidationError);  // negative
}

TEST_CASE("nadid time_integral with the uniform capacity reduces to classical DiD") {
    std::mt19937_64 rng(1515);
    for (int rep = 0; rep < 30; ++rep) {
        const PanelDataset panel = oracles::random_balanced_panel(rng);
        const DidEstimate est =
            nadid_estimate(panel, CapacitySpec::make_uniform(), NadidMode::time_integral);
        CHECK(std::abs(est.value - difference_table(panel).value) <= 1e-12);
    }
}

TEST_CASE("nadid listing mode matches the pooled-difference listing arithmetic") {
    std::mt19937_64 rng(1616);
    const PanelDataset panel = oracles::random_balanced_panel(rng);
    const CellMeans m = cell_means(panel);
    const double expected =
        choquet_listing({m.y1 - m.y3, m.y2 - m.y4}, raw_sigmoid);
    const DidEstimate est =
        nadid_estimate(panel, CapacitySpec::make_sigmoid(5.0, 0.5, Anchor::raw), NadidMode::listing);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-15));
    CHECK(*est.capacity_descriptor == "sigmoid(lambda=5, theta=0.5, anchor=raw)");
}

TEST_CASE("identical paths: time mode vanishes, listing mode exposes its bias") {
    const PanelDataset panel = identical_path_panel();
    const CapacitySpec spec = CapacitySpec::make_sigmoid(5.0, 0.5, Anchor::raw);
    CHECK(std::abs(nadid_estimate(panel, spec, NadidMode::time_integral).value) <= 1e-15);
    // Shared shift d in both groups: listing gives d*g(1), not 0.
    const CellMeans m = cell_means(panel);
    const double d = m.y1 - m.y3;
    const double listing = nadid_estimate(panel, spec, NadidMode::listing).value;
    CHECK(listing == doctest::Approx(d * raw_sigmoid(1.0)).epsilon(1e-12));
    CHECK(std::abs(listing) > 1e-6);
}

TEST_CASE("nadid explicit capacity: matching ground works, listing rejects") {
    std::mt19937_64 rng(1717);
    const PanelDataset panel = oracles::random_balanced_panel(rng);
    const DeltaSeries series = delta_series(panel);
    const int periods = static_cast<int>(series.post_periods.size());
    const auto table = oracles::random_monotone_table(periods, rng);
    const GroundSet ground = GroundSet::from_periods(series.post_periods);
    const Capacity cap = make_explicit_capacity(ground, table, true);

    std::vector<double> d(series.post_periods.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = series.delta_treat[i] - series.delta_control[i];
    }
    const double expected = choquet(ValuedFunction(ground, d), cap);
    const DidEstimate est =
        nadid_estimate(panel, CapacitySpec::make_explicit(cap), NadidMode::time_integral);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-15));

    // Same size but different labels: remapped by order, noted in diagnostics.
    const Capacity renamed = make_explicit_capacity(GroundSet::indexed(periods), table, true);
    const DidEstimate remapped =
        nadid_estimate(panel, CapacitySpec::make_explicit(renamed), NadidMode::time_integral);
    CHECK(remapped.value == doctest::Approx(expected).epsilon(1e-15));
    CHECK(remapped.diagnostics.find("remapped") != std::string::npos);

    // Wrong size errors; listing mode rejects explicit capacities.
    const Capacity tiny = make_uniform_capacity(GroundSet::indexed(periods + 1));
    CHECK_THROWS_AS(
        nadid_estimate(panel, CapacitySpec::make_explicit(tiny), NadidMode::time_integral),
        ValidationError);
    CHECK_THROWS_AS(nadid_estimate(panel, CapacitySpec::make_explicit(cap), NadidMode::listing),
                    ValidationError);
}

TEST_CASE("monotone response: adding c to treated post outcomes shifts estimators by c") {
    std::mt19937_64 rng(1818);
    for (int rep = 0; rep < 10; ++rep) {
        const PanelDataset panel = oracles::random_balanced_panel(rng);
        const double c = 0.75;
        std::vector<PanelRow> shifted = panel.rows();
        for (auto& r : shifted) {
            if (r.treated == 1 && r.post == 1) r.outcome += c;
        }
        const PanelDataset bumped =
            PanelDataset::from_rows(std::move(shifted), panel.treatment_start());

        CHECK(std::abs(difference_table(bumped).value -
                       (difference_table(panel).value + c)) <= 1e-12);
        CHECK(std::abs(did_ols(bumped).delta - (did_ols(panel).delta + c)) <= 1e-12);
        CHECK(std::abs(did_integral(bumped, IntegralWeights::uniform).value -
                       (did_integral(panel, IntegralWeights::uniform).value + c)) <= 1e-12);

        for (const CapacitySpec& spec :
             {CapacitySpec::make_uniform(),
              CapacitySpec::make_sigmoid(5.0, 0.5, Anchor::anchored)}) {
            CHECK(std::abs(nadid_estimate(bumped, spec, NadidMode::time_integral).value -
                           (nadid_estimate(panel, spec, NadidMode::time_integral).value + c)) <= 1e-12);
        }
    }
}
