#include "nadid/simulate.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <utility>

#include "nadid/detail/text.hpp"

namespace nadid {

void SimConfig::validate() const {
    if (num_units < 1) throw ValidationError("num_units must be >= 1");
    if (num_periods < 1) throw ValidationError("num_periods must be >= 1");
    if (treatment_start < 1 || treatment_start > num_periods) {
        throw ValidationError("treatment_start must lie in [1, num_periods]");
    }
    if (!(treated_fraction >= 0.0 && treated_fraction <= 1.0)) {
        throw ValidationError("treated_fraction must lie in [0,1]");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw ValidationError("noise_sd must be finite and >= 0");
    }
    if (!(base_low <= base_high)) {
        throw ValidationError("base_low must not exceed base_high");
    }
    if (!(floor < base_low)) {
        throw ValidationError("floor must be below base_low");
    }
    for (double x : {base_low, base_high, season_amp, season_freq, effect_scale, effect_decay,
                     floor}) {
        if (!std::isfinite(x)) throw ValidationError("non-finite simulation parameter");
    }
}

double treatment_effect(int t, const SimConfig& config) {
    if (t < config.treatment_start) return 0.0;
    const int peak = config.treatment_start + config.effect_peak_offset;
    return config.effect_scale * std::exp(-config.effect_decay * std::abs(t - peak));
}

namespace {

// Self-contained variate generation so the stream is pinned by this file
// alone, not by the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double normal(double sd) {
        // Box-Muller; 1-u keeps the log argument in (0, 1].
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace

PanelDataset generate_panel(const SimConfig& config) {
    config.validate();
    Rng rng(config.seed);

    std::vector<int> treated(static_cast<std::size_t>(config.num_units));
    for (auto& flag : treated) {
        flag = rng.uniform01() < config.treated_fraction ? 1 : 0;
    }
    std::vector<double> baseline(static_cast<std::size_t>(config.num_units));
    for (auto& alpha : baseline) {
        alpha = rng.uniform(config.base_low, config.base_high);
    }

    std::vector<PanelRow> rows;
    rows.reserve(static_cast<std::size_t>(config.num_units) *
                 static_cast<std::size_t>(config.num_periods));
    for (int i = 0; i < config.num_units; ++i) {
        for (int t = 1; t <= config.num_periods; ++t) {
            const double base = baseline[i] +
                                config.season_amp * std::sin(config.season_freq * t) +
                                rng.normal(config.noise_sd);
            const double effect = treated[i] ? treatment_effect(t, config) : 0.0;
            PanelRow row;
            row.unit = std::to_string(i + 1);
            row.period = t;
            row.treated = treated[i];
            row.post = t >= config.treatment_start ? 1 : 0;
            row.outcome = std::max(config.floor, base - effect);
            rows.push_back(std::move(row));
        }
    }
    return PanelDataset::from_rows(std::move(rows), config.treatment_start);
}

std::vector<TrendRow> trend_table(const PanelDataset& panel) {
    std::map<std::pair<int, int>, std::pair<double, long>> cells;
    for (const auto& row : panel.rows()) {
        auto& cell = cells[{row.period, row.treated}];
        cell.first += row.outcome;
        cell.second += 1;
    }
    std::vector<TrendRow> rows;
    rows.reserve(cells.size());
    for (const auto& [key, cell] : cells) {
        rows.push_back(TrendRow{key.first, key.second, cell.first / cell.second});
    }
    return rows;
}

void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows) {
    out << "Period,Treated,MeanOutcome\n";
    for (const auto& row : rows) {
        out << row.period << ',' << row.treated << ',' << detail::fmt_double(row.mean_outcome)
            << '\n';
    }
}

void write_trend_csv_file(const std::string& path, const std::vector<TrendRow>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_trend_csv(out, rows);
    if (!out.good()) {
        throw IoError("write to '" + path + "' failed");
    }
}

}  // namespace nadid
