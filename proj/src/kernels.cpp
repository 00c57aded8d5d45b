#include "nadid/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <limits>

namespace nadid::kernels {

namespace {

// Below this table size the parallel regions fall back to serial execution;
// fork/join overhead dominates tiny lattices.
constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

using i64 = long long;

}  // namespace

// ---------------------------------------------------------------------------
// zeta / Möbius transforms
//
// Both run one pass per bit. Within a pass, every mask containing the bit
// reads only its partner mask without the bit, which no iteration of the same
// pass writes, so the masks of one pass can be processed in any order.
// ---------------------------------------------------------------------------

void zeta_inplace(std::span<double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    const bool par = values.size() >= kParallelThreshold;
    for (int bit = 0; bit < n; ++bit) {
        const i64 step = i64{1} << bit;
#pragma omp parallel for schedule(static) if (par)
        for (i64 mask = 0; mask < size; ++mask) {
            if (mask & step) values[mask] += values[mask ^ step];
        }
    }
}

void mobius_inplace(std::span<double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    const bool par = values.size() >= kParallelThreshold;
    for (int bit = 0; bit < n; ++bit) {
        const i64 step = i64{1} << bit;
#pragma omp parallel for schedule(static) if (par)
        for (i64 mask = 0; mask < size; ++mask) {
            if (mask & step) values[mask] -= values[mask ^ step];
        }
    }
}

// ---------------------------------------------------------------------------
// Covering-pair monotonicity scan
// ---------------------------------------------------------------------------

namespace {

// Pairs are ordered by (mask, bit); encoding mask*n+bit preserves that order,
// so a min-reduction over codes yields the first violation.
constexpr std::uint64_t kNoViolation = std::numeric_limits<std::uint64_t>::max();

std::uint64_t scan_block(std::span<const double> values, int n, double tol, i64 begin, i64 end) {
    std::uint64_t best = kNoViolation;
    for (i64 mask = begin; mask < end; ++mask) {
        for (int bit = 0; bit < n; ++bit) {
            const i64 step = i64{1} << bit;
            if (mask & step) continue;
            if (values[mask] - values[mask | step] > tol) {
                const std::uint64_t code =
                    static_cast<std::uint64_t>(mask) * static_cast<std::uint64_t>(n) +
                    static_cast<std::uint64_t>(bit);
                best = std::min(best, code);
                break;  // later bits of this mask have larger codes
            }
        }
        if (best != kNoViolation && static_cast<std::uint64_t>(mask + 1) *
                                            static_cast<std::uint64_t>(n) >= best) {
            break;  // no later mask in this block can beat the current code
        }
    }
    return best;
}

}  // namespace

std::optional<std::pair<std::uint64_t, std::uint64_t>>
first_monotonicity_violation(std::span<const double> values, int n, double tol) {
    const i64 size = static_cast<i64>(values.size());
    std::uint64_t best = kNoViolation;
    if (values.size() >= kParallelThreshold) {
#pragma omp parallel for schedule(static) reduction(min : best)
        for (i64 block = 0; block < 64; ++block) {
            const i64 begin = size * block / 64;
            const i64 end = size * (block + 1) / 64;
            best = std::min(best, scan_block(values, n, tol, begin, end));
        }
    } else {
        best = scan_block(values, n, tol, 0, size);
    }
    if (best == kNoViolation) return std::nullopt;
    const std::uint64_t mask = best / static_cast<std::uint64_t>(n);
    const std::uint64_t bit = best % static_cast<std::uint64_t>(n);
    return std::make_pair(mask, mask | (std::uint64_t{1} << bit));
}

// ---------------------------------------------------------------------------
// Shapley values
// ---------------------------------------------------------------------------

namespace {

// w(k) = k!(n-k-1)!/n! = 1/(n * C(n-1, k)); binomials are exact in double
// for n <= 20.
std::vector<double> shapley_weights(int n) {
    std::vector<double> weights(static_cast<std::size_t>(n));
    double binom = 1.0;  // C(n-1, k)
    for (int k = 0; k < n; ++k) {
        weights[static_cast<std::size_t>(k)] = 1.0 / (n * binom);
        binom = binom * (n - 1 - k) / (k + 1);
    }
    return weights;
}

}  // namespace

std::vector<double> shapley(std::span<const double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    const auto weights = shapley_weights(n);
    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    const bool par = values.size() >= kParallelThreshold;
    for (int j = 0; j < n; ++j) {
        const i64 step = i64{1} << j;
        double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc) if (par)
        for (i64 mask = 0; mask < size; ++mask) {
            if (mask & step) continue;
            const int k = std::popcount(static_cast<std::uint64_t>(mask));
            acc += weights[static_cast<std::size_t>(k)] *
                   (values[mask | step] - values[mask]);
        }
        phi[static_cast<std::size_t>(j)] = acc;
    }
    return phi;
}

// ---------------------------------------------------------------------------
// Sugeno enumeration
// ---------------------------------------------------------------------------

double sugeno_enumerate(std::span<const double> f, std::span<const double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    // minf[A] = min_{i in A} f[i], built by peeling the lowest bit.
    std::vector<double> minf(static_cast<std::size_t>(size));
    minf[0] = std::numeric_limits<double>::infinity();
    for (i64 mask = 1; mask < size; ++mask) {
        const int low = std::countr_zero(static_cast<std::uint64_t>(mask));
        const i64 rest = mask & (mask - 1);
        minf[static_cast<std::size_t>(mask)] =
            std::min(f[static_cast<std::size_t>(low)], minf[static_cast<std::size_t>(rest)]);
    }
    double best = -std::numeric_limits<double>::infinity();
    const bool par = values.size() >= kParallelThreshold;
#pragma omp parallel for schedule(static) reduction(max : best) if (par)
    for (i64 mask = 1; mask < size; ++mask) {
        best = std::max(best, std::min(minf[static_cast<std::size_t>(mask)], values[mask]));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Serial twins
// ---------------------------------------------------------------------------

namespace serial {

void zeta_inplace(std::span<double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    for (int bit = 0; bit < n; ++bit) {
        const i64 step = i64{1} << bit;
        for (i64 mask = 0; mask < size; ++mask) {
            if (mask & step) values[mask] += values[mask ^ step];
        }
    }
}

void mobius_inplace(std::span<double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    for (int bit = 0; bit < n; ++bit) {
        const i64 step = i64{1} << bit;
        for (i64 mask = 0; mask < size; ++mask) {
            if (mask & step) values[mask] -= values[mask ^ step];
        }
    }
}

std::optional<std::pair<std::uint64_t, std::uint64_t>>
first_monotonicity_violation(std::span<const double> values, int n, double tol) {
    const i64 size = static_cast<i64>(values.size());
    for (i64 mask = 0; mask < size; ++mask) {
        for (int bit = 0; bit < n; ++bit) {
            const i64 step = i64{1} << bit;
            if (mask & step) continue;
            if (values[mask] - values[mask | step] > tol) {
                return std::make_pair(static_cast<std::uint64_t>(mask),
                                      static_cast<std::uint64_t>(mask | step));
            }
        }
    }
    return std::nullopt;
}

std::vector<double> shapley(std::span<const double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    const auto weights = shapley_weights(n);
    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const i64 step = i64{1} << j;
        double acc = 0.0;
        for (i64 mask = 0; mask < size; ++mask) {
            if (mask & step) continue;
            const int k = std::popcount(static_cast<std::uint64_t>(mask));
            acc += weights[static_cast<std::size_t>(k)] *
                   (values[mask | step] - values[mask]);
        }
        phi[static_cast<std::size_t>(j)] = acc;
    }
    return phi;
}

double sugeno_enumerate(std::span<const double> f, std::span<const double> values, int n) {
    const i64 size = static_cast<i64>(values.size());
    std::vector<double> minf(static_cast<std::size_t>(size));
    minf[0] = std::numeric_limits<double>::infinity();
    for (i64 mask = 1; mask < size; ++mask) {
        const int low = std::countr_zero(static_cast<std::uint64_t>(mask));
        const i64 rest = mask & (mask - 1);
        minf[static_cast<std::size_t>(mask)] =
            std::min(f[static_cast<std::size_t>(low)], minf[static_cast<std::size_t>(rest)]);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (i64 mask = 1; mask < size; ++mask) {
        best = std::max(best, std::min(minf[static_cast<std::size_t>(mask)], values[mask]));
    }
    return best;
}

}  // namespace serial

}  // namespace nadid::kernels
