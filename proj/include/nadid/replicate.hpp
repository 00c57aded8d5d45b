#pragma once

#include <cstdint>
#include <vector>

#include "nadid/did.hpp"
#include "nadid/simulate.hpp"

namespace nadid {

struct ReplicateRow {
    std::uint64_t seed = 0;
    double classical = 0.0;
    double nadid = 0.0;
};

struct ReplicateSummary {
    std::vector<ReplicateRow> per_seed;
    double mean_classical = 0.0;
    double mean_nadid = 0.0;
    /// Share of seeds with |NA-DiD| < |classical DiD|.
    double attenuation_fraction = 0.0;
};

/// Full pipeline per seed (generate -> classical DiD + NA-DiD), seeds
/// base_seed..base_seed+count-1. Seeds run in parallel; outputs are written
/// by index and the summary is reduced serially, so results are
/// deterministic regardless of thread count.
ReplicateSummary replicate(const SimConfig& base_config, int seed_count,
                           std::uint64_t base_seed, const CapacitySpec& spec, NadidMode mode);

namespace serial_ref {
/// Serial twin of replicate(), kept for tests and the benchmark.
ReplicateSummary replicate(const SimConfig& base_config, int seed_count,
                           std::uint64_t base_seed, const CapacitySpec& spec, NadidMode mode);
}  // namespace serial_ref

}  // namespace nadid
