#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace nadid::kernels {

// Subset-lattice kernels. `values` always has length 2^n, indexed by subset
// bitmask. The OpenMP variants are the production path; identical serial
// twins live in kernels::serial and back the equality tests and the
// bench_kernels comparison.

/// In-place zeta transform: out[A] = sum_{B subseteq A} in[B].
/// Turns Möbius coefficients into capacity values.
void zeta_inplace(std::span<double> values, int n);

/// In-place Möbius transform (inverse of zeta):
/// out[A] = sum_{B subseteq A} (-1)^{|A \ B|} in[B].
void mobius_inplace(std::span<double> values, int n);

/// First covering-pair monotonicity violation, scanning pairs (A, A|bit) in
/// ascending (mask, bit) order. `tol`: a pair violates when
/// value[A] - value[A|bit] > tol. Returns the lowest-ordered violating pair.
std::optional<std::pair<std::uint64_t, std::uint64_t>>
first_monotonicity_violation(std::span<const double> values, int n, double tol);

/// Shapley values, one per element, computed from an explicit table.
std::vector<double> shapley(std::span<const double> values, int n);

/// Sugeno integral: max over non-empty A of min(min_{i in A} f[i], values[A]).
double sugeno_enumerate(std::span<const double> f, std::span<const double> values, int n);

namespace serial {
void zeta_inplace(std::span<double> values, int n);
void mobius_inplace(std::span<double> values, int n);
std::optional<std::pair<std::uint64_t, std::uint64_t>>
first_monotonicity_violation(std::span<const double> values, int n, double tol);
std::vector<double> shapley(std::span<const double> values, int n);
double sugeno_enumerate(std::span<const double> f, std::span<const double> values, int n);
}  // namespace serial

}  // namespace nadid::kernels
