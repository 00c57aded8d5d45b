#include "nadid/capacity.hpp"

#include <cmath>

#include "nadid/kernels.hpp"

namespace nadid {

double SigmoidDistortion::operator()(double m) const {
    return 1.0 / (1.0 + std::exp(-lambda * (m - theta)));
}

void SigmoidDistortion::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("sigmoid lambda must be positive, got " + std::to_string(lambda));
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ValidationError("sigmoid theta must lie in [0,1], got " + std::to_string(theta));
    }
}

Capacity::Capacity(GroundSet ground, Representation repr, bool normalized)
    : ground_(std::move(ground)), repr_(std::move(repr)), normalized_(normalized) {
    const std::size_t expected = ground_.subset_count();
    if (const auto* table = std::get_if<ExplicitTable>(&repr_)) {
        if (table->values.size() != expected) {
            throw ValidationError("explicit capacity table has " +
                                  std::to_string(table->values.size()) + " entries, expected " +
                                  std::to_string(expected));
        }
    } else if (const auto* mob = std::get_if<MobiusCoeffs>(&repr_)) {
        if (mob->coeffs.size() != expected) {
            throw ValidationError("Möbius coefficient vector has " +
                                  std::to_string(mob->coeffs.size()) + " entries, expected " +
                                  std::to_string(expected));
        }
    }
}

double Capacity::value(Mask mask) const {
    if (const auto* table = std::get_if<ExplicitTable>(&repr_)) {
        return table->values[static_cast<std::size_t>(mask)];
    }
    if (const auto* mob = std::get_if<MobiusCoeffs>(&repr_)) {
        // nu(A) = sum over submasks of A.
        double total = mob->coeffs[0];
        for (Mask sub = mask; sub != 0; sub = (sub - 1) & mask) {
            total += mob->coeffs[static_cast<std::size_t>(sub)];
        }
        return total;
    }
    const auto& dist = std::get<Distorted>(repr_);
    const double m = static_cast<double>(popcount(mask)) / ground_.size();
    if (dist.kind == Distorted::Kind::identity) return m;
    if (dist.anchor == Anchor::raw) return dist.sigmoid(m);
    const double g0 = dist.sigmoid(0.0);
    const double g1 = dist.sigmoid(1.0);
    return (dist.sigmoid(m) - g0) / (g1 - g0);
}

std::vector<double> Capacity::to_table() const {
    ground_.require_exhaustive("capacity table expansion");
    const std::size_t size = ground_.subset_count();
    if (const auto* table = std::get_if<ExplicitTable>(&repr_)) {
        return table->values;
    }
    if (const auto* mob = std::get_if<MobiusCoeffs>(&repr_)) {
        std::vector<double> values = mob->coeffs;
        kernels::zeta_inplace(values, ground_.size());
        return values;
    }
    std::vector<double> values(size);
    for (std::size_t mask = 0; mask < size; ++mask) {
        values[mask] = value(static_cast<Mask>(mask));
    }
    return values;
}

Capacity make_sigmoid_capacity(const GroundSet& ground, const SigmoidDistortion& params,
                               Anchor anchor) {
    params.validate();
    Capacity::Distorted dist;
    dist.kind = Capacity::Distorted::Kind::sigmoid;
    dist.sigmoid = params;
    dist.anchor = anchor;
    return Capacity(ground, dist, anchor == Anchor::anchored);
}

Capacity make_uniform_capacity(const GroundSet& ground) {
    Capacity::Distorted dist;
    dist.kind = Capacity::Distorted::Kind::identity;
    return Capacity(ground, dist, /*normalized=*/true);
}

Capacity make_explicit_capacity(const GroundSet& ground, std::vector<double> values,
                                bool normalized) {
    return Capacity(ground, Capacity::ExplicitTable{std::move(values)}, normalized);
}

Capacity make_mobius_capacity(const GroundSet& ground, std::vector<double> coeffs,
                              bool normalized) {
    return Capacity(ground, Capacity::MobiusCoeffs{std::move(coeffs)}, normalized);
}

ValidityReport validate(const Capacity& capacity, double tol) {
    capacity.ground().require_exhaustive("validate");
    const auto table = capacity.to_table();
    const int n = capacity.ground().size();
    ValidityReport report;
    report.grounded = std::abs(table.front()) <= tol;
    report.normalized = std::abs(table.back() - 1.0) <= tol;
    const auto violation = kernels::first_monotonicity_violation(table, n, tol);
    report.monotone = !violation.has_value();
    report.first_violation = violation;
    return report;
}

std::vector<double> mobius_transform(const Capacity& capacity) {
    capacity.ground().require_exhaustive("mobius_transform");
    if (capacity.is_mobius()) {
        return std::get<Capacity::MobiusCoeffs>(capacity.representation()).coeffs;
    }
    std::vector<double> coeffs = capacity.to_table();
    kernels::mobius_inplace(coeffs, capacity.ground().size());
    return coeffs;
}

std::vector<double> shapley_values(const Capacity& capacity) {
    capacity.ground().require_exhaustive("shapley_values");
    const auto table = capacity.to_table();
    return kernels::shapley(table, capacity.ground().size());
}

TruncationResult k_additive_truncate(const Capacity& capacity, int k) {
    const int n = capacity.ground().size();
    if (k < 1 || k > n) {
        throw ValidationError("k must lie in [1, n]; got k=" + std::to_string(k) +
                              ", n=" + std::to_string(n));
    }
    std::vector<double> coeffs = mobius_transform(capacity);
    for (std::size_t mask = 0; mask < coeffs.size(); ++mask) {
        if (popcount(static_cast<Mask>(mask)) > k) coeffs[mask] = 0.0;
    }
    kernels::zeta_inplace(coeffs, n);
    Capacity rebuilt = make_explicit_capacity(capacity.ground(), std::move(coeffs),
                                              /*normalized=*/false);
    ValidityReport report = validate(rebuilt);
    if (report.grounded && report.normalized) {
        rebuilt = make_explicit_capacity(
            capacity.ground(), std::get<Capacity::ExplicitTable>(rebuilt.representation()).values,
            /*normalized=*/true);
    }
    return TruncationResult{std::move(rebuilt), report};
}

}  // namespace nadid
