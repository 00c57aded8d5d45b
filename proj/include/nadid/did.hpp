#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nadid/capacity.hpp"
#include "nadid/panel.hpp"

namespace nadid {

/// 2x2 cell means of a panel: y1 = treated/post, y2 = control/post,
/// y3 = treated/pre, y4 = control/pre.
struct CellMeans {
    double y1 = 0, y2 = 0, y3 = 0, y4 = 0;
};

enum class DidMethod { difference_table, ols, integral, nadid_time, nadid_listing };

const char* method_name(DidMethod m);

struct DidEstimate {
    DidMethod method = DidMethod::difference_table;
    double value = 0.0;
    std::optional<CellMeans> cell_means;
    std::optional<std::string> capacity_descriptor;
    std::string diagnostics;
};

/// Per-post-period deviations from the pooled pre-period group baselines:
/// delta_g(t) = mean(outcome | group g, period t) - baseline_g.
struct DeltaSeries {
    std::vector<int> post_periods;  // ascending
    std::vector<double> delta_treat;
    std::vector<double> delta_control;
    double baseline_treat = 0.0;
    double baseline_control = 0.0;
    // Observations per post period (both groups), for count-proportional weights.
    std::vector<long> period_counts;
};

struct OlsCoefficients {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
};

/// Classical difference-table estimator (cell means, both difference orders
/// checked against each other).
DidEstimate difference_table(const PanelDataset& panel);

CellMeans cell_means(const PanelDataset& panel);

/// Closed-form least squares on the saturated model
/// y = alpha + beta*D + gamma*T + delta*D*T; delta is the DiD estimate.
OlsCoefficients did_ols(const PanelDataset& panel);

DeltaSeries delta_series(const PanelDataset& panel);

enum class IntegralWeights { count_proportional, uniform };

/// Linear time aggregation sum_t w_t (delta_treat(t) - delta_control(t)) for
/// an explicit probability vector over post periods.
DidEstimate did_integral(const PanelDataset& panel, const std::vector<double>& weights);
DidEstimate did_integral(const PanelDataset& panel,
                         IntegralWeights weights = IntegralWeights::count_proportional);

enum class NadidMode { time_integral, listing };

/// Capacity choice for the NA-DiD estimator. Exactly one of sigmoid/uniform/
/// explicit_capacity applies; listing mode requires a distortion kind
/// (sigmoid or uniform).
struct CapacitySpec {
    enum class Kind { sigmoid, uniform, explicit_table } kind = Kind::sigmoid;
    SigmoidDistortion sigmoid;
    Anchor anchor = Anchor::raw;
    std::optional<Capacity> explicit_capacity;

    static CapacitySpec make_sigmoid(double lambda, double theta, Anchor anchor);
    static CapacitySpec make_uniform();
    static CapacitySpec make_explicit(Capacity capacity);

    std::string describe() const;
};

/// NA-DiD estimator.
///   time_integral: Choquet integral (canonical form) of
///     d(t) = delta_treat(t) - delta_control(t) over the post periods.
///   listing: listing-form Choquet of the 2-vector
///     [pooled treated diff, pooled control diff], as in the replication.
DidEstimate nadid_estimate(const PanelDataset& panel, const CapacitySpec& spec, NadidMode mode);

}  // namespace nadid
