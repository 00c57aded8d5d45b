#include "nadid/replicate.hpp"

#include <cmath>
#include <exception>

namespace nadid {

namespace {

ReplicateRow run_seed(const SimConfig& base_config, std::uint64_t seed,
                      const CapacitySpec& spec, NadidMode mode) {
    SimConfig config = base_config;
    config.seed = seed;
    const PanelDataset panel = generate_panel(config);
    ReplicateRow row;
    row.seed = seed;
    row.classical = difference_table(panel).value;
    row.nadid = nadid_estimate(panel, spec, mode).value;
    return row;
}

ReplicateSummary summarize(std::vector<ReplicateRow> rows) {
    ReplicateSummary summary;
    summary.per_seed = std::move(rows);
    double sum_classical = 0.0;
    double sum_nadid = 0.0;
    long attenuated = 0;
    for (const auto& row : summary.per_seed) {
        sum_classical += row.classical;
        sum_nadid += row.nadid;
        if (std::abs(row.nadid) < std::abs(row.classical)) ++attenuated;
    }
    const double count = static_cast<double>(summary.per_seed.size());
    summary.mean_classical = sum_classical / count;
    summary.mean_nadid = sum_nadid / count;
    summary.attenuation_fraction = static_cast<double>(attenuated) / count;
    return summary;
}

}  // namespace

ReplicateSummary replicate(const SimConfig& base_config, int seed_count,
                           std::uint64_t base_seed, const CapacitySpec& spec, NadidMode mode) {
    if (seed_count < 1) {
        throw ValidationError("seed count must be >= 1");
    }
    base_config.validate();
    std::vector<ReplicateRow> rows(static_cast<std::size_t>(seed_count));
    // Seeds are independent; rows are written by index so the result does not
    // depend on the thread count. Exceptions must not unwind out of the
    // parallel region, so the first one is carried across it by hand.
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < seed_count; ++i) {
        try {
            rows[static_cast<std::size_t>(i)] =
                run_seed(base_config, base_seed + static_cast<std::uint64_t>(i), spec, mode);
        } catch (...) {
#pragma omp critical(nadid_replicate_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return summarize(std::move(rows));
}

namespace serial_ref {

ReplicateSummary replicate(const SimConfig& base_config, int seed_count,
                           std::uint64_t base_seed, const CapacitySpec& spec, NadidMode mode) {
    if (seed_count < 1) {
        throw ValidationError("seed count must be >= 1");
    }
    base_config.validate();
    std::vector<ReplicateRow> rows(static_cast<std::size_t>(seed_count));
    for (int i = 0; i < seed_count; ++i) {
        rows[static_cast<std::size_t>(i)] =
            run_seed(base_config, base_seed + static_cast<std::uint64_t>(i), spec, mode);
    }
    return summarize(std::move(rows));
}

}  // namespace serial_ref

}  // namespace nadid
