#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "nadid/error.hpp"

namespace nadid {

using Mask = std::uint64_t;

/// Finite ground set. Subsets are addressed by bitmask: bit i of the mask
/// corresponds to labels()[i]. This indexing is part of the on-disk format.
class GroundSet {
public:
    // Hard cap so any subset fits in a 64-bit mask.
    static constexpr int kMaxSize = 63;
    // Exhaustive subset operations (validate, Möbius, Shapley, Sugeno) are
    // capped at this size; beyond it they error rather than silently sample.
    static constexpr int kMaxExhaustive = 20;

    explicit GroundSet(std::vector<std::string> labels);

    /// Labels "1".."n".
    static GroundSet indexed(int n);
    /// Labels are the decimal period numbers, in the given order.
    static GroundSet from_periods(const std::vector<int>& periods);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }

    Mask full_mask() const { return (Mask{1} << size()) - 1; }
    std::size_t subset_count() const { return std::size_t{1} << size(); }

    void require_exhaustive(const char* op) const;

    bool operator==(const GroundSet& other) const { return labels_ == other.labels_; }
    bool operator!=(const GroundSet& other) const { return !(*this == other); }

private:
    std::vector<std::string> labels_;
};

inline int popcount(Mask mask) { return std::popcount(mask); }

}  // namespace nadid
