#include "nadid/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nadid/kernels.hpp"

namespace nadid {

namespace {

void require_same_ground(const ValuedFunction& f, const Capacity& capacity, const char* op) {
    if (f.ground != capacity.ground()) {
        throw ValidationError(std::string(op) +
                              ": function and capacity live on different ground sets");
    }
}

}  // namespace

ValuedFunction::ValuedFunction(GroundSet g, std::vector<double> v)
    : ground(std::move(g)), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(ground.size())) {
        throw ValidationError("valued function has " + std::to_string(values.size()) +
                              " values for a ground set of size " +
                              std::to_string(ground.size()));
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw ValidationError("valued function contains a non-finite value");
        }
    }
}

double choquet(const ValuedFunction& f, const Capacity& capacity) {
    require_same_ground(f, capacity, "choquet");
    const int n = f.ground.size();
    // Ascending stable sort; ties keep original index order, which cannot
    // change the result (equal values contribute a zero increment).
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return f.values[a] < f.values[b]; });

    double total = 0.0;
    double prev = 0.0;  // f(x_(0)) = 0
    Mask upper = f.ground.full_mask();
    for (int idx : order) {
        total += (f.values[idx] - prev) * capacity.value(upper);
        prev = f.values[idx];
        upper &= ~(Mask{1} << idx);
    }
    return total;
}

double choquet_listing(const std::vector<double>& values,
                       const std::function<double(double)>& distortion) {
    if (values.empty()) {
        throw ValidationError("choquet_listing: empty value vector");
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw ValidationError("choquet_listing: non-finite value");
        }
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const int n = static_cast<int>(sorted.size());
    double total = 0.0;
    double prev_weight = 0.0;
    for (int i = 0; i < n; ++i) {
        const double weight = distortion(static_cast<double>(i + 1) / n);
        total += (i == 0) ? sorted[0] * weight : sorted[i] * (weight - prev_weight);
        prev_weight = weight;
    }
    return total;
}

double sugeno(const ValuedFunction& f, const Capacity& capacity) {
    require_same_ground(f, capacity, "sugeno");
    f.ground.require_exhaustive("sugeno");
    const auto table = capacity.to_table();
    return kernels::sugeno_enumerate(f.values, table, f.ground.size());
}

}  // namespace nadid
