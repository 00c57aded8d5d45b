#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nadid/panel.hpp"

namespace nadid {

/// Hospital-hygiene DGP configuration. Defaults reproduce the synthetic
/// experiment exactly: Y_it = max(floor, alpha_i + season - D_i * tau(t) + noise)
/// with alpha_i ~ U(base_low, base_high), season = season_amp*sin(season_freq*t),
/// noise ~ N(0, noise_sd), and tau the peaked-decay treatment effect.
struct SimConfig {
    int num_units = 50;
    int num_periods = 30;
    int treatment_start = 12;     // in [1, num_periods]
    double treated_fraction = 0.7;
    std::uint64_t seed = 42;
    double noise_sd = 0.02;
    double base_low = 0.1;
    double base_high = 0.3;
    double season_amp = 0.05;
    double season_freq = 0.5;
    int effect_peak_offset = 3;
    double effect_scale = 0.4;
    double effect_decay = 0.3;
    double floor = 0.02;

    void validate() const;  // throws ValidationError
};

/// tau(t): 0 before treatment_start, then
/// effect_scale * exp(-effect_decay * |t - t_peak|), t_peak = start + offset.
double treatment_effect(int t, const SimConfig& config);

/// Deterministic given config.seed. RNG: mt19937_64; uniforms via
/// (x >> 11) * 2^-53; normals via Box-Muller (two fresh uniforms per draw).
/// Draw order: treated flags per unit, baselines per unit, then row noise
/// unit-major/period-minor.
PanelDataset generate_panel(const SimConfig& config);

struct TrendRow {
    int period;
    int treated;
    double mean_outcome;
};

/// Mean outcome per (period, treated group), ordered by period then group.
std::vector<TrendRow> trend_table(const PanelDataset& panel);

void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows);
void write_trend_csv_file(const std::string& path, const std::vector<TrendRow>& rows);

}  // namespace nadid
