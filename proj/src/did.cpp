#include "nadid/did.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "nadid/detail/text.hpp"
#include "nadid/integrals.hpp"

namespace nadid {

const char* method_name(DidMethod m) {
    switch (m) {
        case DidMethod::difference_table: return "difference_table";
        case DidMethod::ols: return "ols";
        case DidMethod::integral: return "integral";
        case DidMethod::nadid_time: return "nadid_time";
        case DidMethod::nadid_listing: return "nadid_listing";
    }
    return "?";
}

namespace {

const char* cell_name(int treated, int post) {
    if (treated == 1) return post == 1 ? "treated/post" : "treated/pre";
    return post == 1 ? "control/post" : "control/pre";
}

}  // namespace

CellMeans cell_means(const PanelDataset& panel) {
    double sums[2][2] = {{0, 0}, {0, 0}};
    long counts[2][2] = {{0, 0}, {0, 0}};
    for (const auto& row : panel.rows()) {
        sums[row.treated][row.post] += row.outcome;
        counts[row.treated][row.post] += 1;
    }
    for (int d = 0; d < 2; ++d) {
        for (int p = 0; p < 2; ++p) {
            if (counts[d][p] == 0) {
                throw ValidationError(std::string("empty cell: no observations in the ") +
                                      cell_name(d, p) + " cell");
            }
        }
    }
    CellMeans m;
    m.y1 = sums[1][1] / counts[1][1];
    m.y2 = sums[0][1] / counts[0][1];
    m.y3 = sums[1][0] / counts[1][0];
    m.y4 = sums[0][0] / counts[0][0];
    return m;
}

DidEstimate difference_table(const PanelDataset& panel) {
    const CellMeans m = cell_means(panel);
    const double by_group = (m.y1 - m.y3) - (m.y2 - m.y4);
    const double by_time = (m.y1 - m.y2) - (m.y3 - m.y4);
    // The two orders agree in exact arithmetic; in doubles they can differ by
    // rounding, so equality is checked at ulp scale.
    const double scale = std::max({std::abs(m.y1), std::abs(m.y2), std::abs(m.y3),
                                   std::abs(m.y4), 1.0});
    const double eps = std::numeric_limits<double>::epsilon();
    if (std::abs(by_group - by_time) > 16 * eps * scale) {
        throw Error("difference_table: the two difference orders disagree beyond rounding (" +
                    detail::fmt_double(by_group) + " vs " + detail::fmt_double(by_time) + ")");
    }
    DidEstimate est;
    est.method = DidMethod::difference_table;
    est.value = by_group;
    est.cell_means = m;
    est.diagnostics = "orders: by_group=" + detail::fmt_double(by_group) +
                      " by_time=" + detail::fmt_double(by_time);
    return est;
}

OlsCoefficients did_ols(const PanelDataset& panel) {
    cell_means(panel);  // rejects singular designs with a named empty cell
    // Normal equations of the saturated design {1, D, T, D*T}.
    Eigen::Matrix4d xtx = Eigen::Matrix4d::Zero();
    Eigen::Vector4d xty = Eigen::Vector4d::Zero();
    for (const auto& row : panel.rows()) {
        const Eigen::Vector4d x(1.0, static_cast<double>(row.treated),
                                static_cast<double>(row.post),
                                static_cast<double>(row.treated * row.post));
        xtx.noalias() += x * x.transpose();
        xty.noalias() += x * row.outcome;
    }
    const Eigen::Vector4d coef = xtx.ldlt().solve(xty);
    return OlsCoefficients{coef[0], coef[1], coef[2], coef[3]};
}

DeltaSeries delta_series(const PanelDataset& panel) {
    double pre_sum[2] = {0, 0};
    long pre_count[2] = {0, 0};
    // (period -> (sum, count)) per group, post periods only.
    std::map<int, std::pair<double, long>> post_cells[2];
    std::map<int, long> period_totals;
    for (const auto& row : panel.rows()) {
        if (row.post == 0) {
            pre_sum[row.treated] += row.outcome;
            pre_count[row.treated] += 1;
        } else {
            auto& cell = post_cells[row.treated][row.period];
            cell.first += row.outcome;
            cell.second += 1;
            period_totals[row.period] += 1;
        }
    }
    for (int g = 0; g < 2; ++g) {
        const char* group = g == 1 ? "treated" : "control";
        if (pre_count[g] == 0) {
            throw ValidationError(std::string("group '") + group +
                                  "' has no pre-treatment observations");
        }
        if (post_cells[g].empty()) {
            throw ValidationError(std::string("group '") + group +
                                  "' has no post-treatment observations");
        }
    }

    DeltaSeries series;
    series.baseline_treat = pre_sum[1] / pre_count[1];
    series.baseline_control = pre_sum[0] / pre_count[0];
    for (const auto& [period, total] : period_totals) {
        for (int g = 0; g < 2; ++g) {
            auto it = post_cells[g].find(period);
            if (it == post_cells[g].end()) {
                throw ValidationError(std::string("group '") + (g == 1 ? "treated" : "control") +
                                      "' has no observations at post period " +
                                      std::to_string(period));
            }
        }
        series.post_periods.push_back(period);
        series.period_counts.push_back(total);
        const auto& t_cell = post_cells[1][period];
        const auto& c_cell = post_cells[0][period];
        series.delta_treat.push_back(t_cell.first / t_cell.second - series.baseline_treat);
        series.delta_control.push_back(c_cell.first / c_cell.second - series.baseline_control);
    }
    return series;
}

DidEstimate did_integral(const PanelDataset& panel, const std::vector<double>& weights) {
    const DeltaSeries series = delta_series(panel);
    if (weights.size() != series.post_periods.size()) {
        throw ValidationError("weight vector has " + std::to_string(weights.size()) +
                              " entries for " + std::to_string(series.post_periods.size()) +
                              " post periods");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw ValidationError("weights must be non-negative and finite");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("weights must sum to 1 (got " + detail::fmt_double(sum) + ")");
    }
    double value = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        value += weights[i] * (series.delta_treat[i] - series.delta_control[i]);
    }
    DidEstimate est;
    est.method = DidMethod::integral;
    est.value = value;
    return est;
}

DidEstimate did_integral(const PanelDataset& panel, IntegralWeights weights) {
    const DeltaSeries series = delta_series(panel);
    const std::size_t count = series.post_periods.size();
    std::vector<double> w(count);
    if (weights == IntegralWeights::uniform) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(count));
    } else {
        long total = 0;
        for (long c : series.period_counts) total += c;
        for (std::size_t i = 0; i < count; ++i) {
            w[i] = static_cast<double>(series.period_counts[i]) / static_cast<double>(total);
        }
    }
    DidEstimate est = did_integral(panel, w);
    est.diagnostics = weights == IntegralWeights::uniform ? "weights: uniform"
                                                          : "weights: count-proportional";
    return est;
}

CapacitySpec CapacitySpec::make_sigmoid(double lambda, double theta, Anchor anchor) {
    CapacitySpec spec;
    spec.kind = Kind::sigmoid;
    spec.sigmoid = SigmoidDistortion{lambda, theta};
    spec.anchor = anchor;
    return spec;
}

CapacitySpec CapacitySpec::make_uniform() {
    CapacitySpec spec;
    spec.kind = Kind::uniform;
    return spec;
}

CapacitySpec CapacitySpec::make_explicit(Capacity capacity) {
    CapacitySpec spec;
    spec.kind = Kind::explicit_table;
    spec.explicit_capacity = std::move(capacity);
    return spec;
}

std::string CapacitySpec::describe() const {
    switch (kind) {
        case Kind::uniform:
            return "uniform";
        case Kind::sigmoid: {
            std::ostringstream out;
            out << "sigmoid(lambda=" << detail::fmt_double(sigmoid.lambda)
                << ", theta=" << detail::fmt_double(sigmoid.theta)
                << ", anchor=" << (anchor == Anchor::raw ? "raw" : "anchored") << ")";
            return out.str();
        }
        case Kind::explicit_table:
            return "explicit(n=" +
                   std::to_string(explicit_capacity ? explicit_capacity->ground().size() : 0) +
                   ")";
    }
    return "?";
}

namespace {

// Scalar distortion used by the listing form.
std::function<double(double)> listing_distortion(const CapacitySpec& spec) {
    switch (spec.kind) {
        case CapacitySpec::Kind::uniform:
            return [](double x) { return x; };
        case CapacitySpec::Kind::sigmoid: {
            const SigmoidDistortion g = spec.sigmoid;
            g.validate();
            if (spec.anchor == Anchor::raw) {
                return [g](double x) { return g(x); };
            }
            const double g0 = g(0.0);
            const double g1 = g(1.0);
            return [g, g0, g1](double x) { return (g(x) - g0) / (g1 - g0); };
        }
        case CapacitySpec::Kind::explicit_table:
            throw ValidationError(
                "listing mode needs a scalar distortion (sigmoid or uniform); an explicit "
                "capacity table has no canonical one");
    }
    throw ValidationError("unknown capacity spec");
}

Capacity capacity_for_ground(const CapacitySpec& spec, const GroundSet& ground,
                             std::string& notes) {
    switch (spec.kind) {
        case CapacitySpec::Kind::uniform:
            return make_uniform_capacity(ground);
        case CapacitySpec::Kind::sigmoid:
            return make_sigmoid_capacity(ground, spec.sigmoid, spec.anchor);
        case CapacitySpec::Kind::explicit_table: {
            if (!spec.explicit_capacity.has_value()) {
                throw ValidationError("explicit capacity spec carries no capacity");
            }
            const Capacity& cap = *spec.explicit_capacity;
            if (cap.ground() == ground) return cap;
            if (cap.ground().size() != ground.size()) {
                throw ValidationError(
                    "capacity ground set has " + std::to_string(cap.ground().size()) +
                    " elements but the panel has " + std::to_string(ground.size()) +
                    " post periods");
            }
            notes += "capacity labels remapped onto post periods by ascending order; ";
            return Capacity(ground, cap.representation(), cap.normalized());
        }
    }
    throw ValidationError("unknown capacity spec");
}

}  // namespace

DidEstimate nadid_estimate(const PanelDataset& panel, const CapacitySpec& spec, NadidMode mode) {
    DidEstimate est;
    est.capacity_descriptor = spec.describe();
    if (mode == NadidMode::listing) {
        const CellMeans m = cell_means(panel);
        const double diff_treat = m.y1 - m.y3;
        const double diff_control = m.y2 - m.y4;
        est.method = DidMethod::nadid_listing;
        est.value = choquet_listing({diff_treat, diff_control}, listing_distortion(spec));
        est.cell_means = m;
        est.diagnostics = "listing over [diff_treat, diff_control]";
        return est;
    }
    const DeltaSeries series = delta_series(panel);
    const GroundSet ground = GroundSet::from_periods(series.post_periods);
    std::vector<double> d(series.post_periods.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = series.delta_treat[i] - series.delta_control[i];
    }
    std::string notes;
    const Capacity capacity = capacity_for_ground(spec, ground, notes);
    est.method = DidMethod::nadid_time;
    est.value = choquet(ValuedFunction(ground, std::move(d)), capacity);
    est.diagnostics = notes + "Choquet over " + std::to_string(series.post_periods.size()) +
                      " post periods";
    return est;
}

}  // namespace nadid
