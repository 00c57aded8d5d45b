#include "nadid/ground_set.hpp"

#include <unordered_set>

namespace nadid {

GroundSet::GroundSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
        throw ValidationError("ground set must have at least one element");
    }
    if (labels_.size() > kMaxSize) {
        throw ValidationError("ground set too large: " + std::to_string(labels_.size()) +
                              " elements (max " + std::to_string(kMaxSize) + ")");
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : labels_) {
        if (!seen.insert(label).second) {
            throw ValidationError("duplicate ground-set label: " + label);
        }
    }
}

GroundSet GroundSet::indexed(int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n > 0 ? n : 0));
    for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
    return GroundSet(std::move(labels));
}

GroundSet GroundSet::from_periods(const std::vector<int>& periods) {
    std::vector<std::string> labels;
    labels.reserve(periods.size());
    for (int p : periods) labels.push_back(std::to_string(p));
    return GroundSet(std::move(labels));
}

void GroundSet::require_exhaustive(const char* op) const {
    if (size() > kMaxExhaustive) {
        throw ValidationError(std::string(op) + ": ground set of size " +
                              std::to_string(size()) + " exceeds the exhaustive cap of " +
                              std::to_string(kMaxExhaustive));
    }
}

}  // namespace nadid
