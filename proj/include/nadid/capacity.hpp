#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nadid/ground_set.hpp"

namespace nadid {

/// Sigmoid distortion g(m) = 1 / (1 + exp(-lambda * (m - theta))), strictly
/// increasing, strictly inside (0,1).
struct SigmoidDistortion {
    double lambda = 5.0;  // steepness, > 0
    double theta = 0.5;   // transition location, in [0,1]

    double operator()(double m) const;
    void validate() const;  // throws ValidationError on bad parameters
};

/// How a distorted capacity treats the sigmoid's boundary values.
/// `raw` keeps g verbatim (so nu(empty) > 0, nu(X) < 1); `anchored` rescales
/// to (g(m) - g(0)) / (g(1) - g(0)) so the boundary conditions hold.
enum class Anchor { raw, anchored };

struct ValidityReport {
    bool grounded = false;
    bool normalized = false;
    bool monotone = false;
    // First violating covering pair (A, A ∪ {x}) when not monotone.
    std::optional<std::pair<Mask, Mask>> first_violation;

    bool ok() const { return grounded && normalized && monotone; }
};

/// Capacity (non-additive measure) on a finite ground set. Immutable after
/// construction. Three representations:
///   ExplicitTable — 2^n values indexed by subset bitmask,
///   MobiusCoeffs  — 2^n Möbius coefficients (values via the zeta transform),
///   Distorted     — g(|A|/n) for a scalar distortion g, evaluated lazily
///                   (identity g gives the uniform additive capacity).
class Capacity {
public:
    struct ExplicitTable {
        std::vector<double> values;
    };
    struct MobiusCoeffs {
        std::vector<double> coeffs;
    };
    struct Distorted {
        enum class Kind { identity, sigmoid } kind = Kind::identity;
        SigmoidDistortion sigmoid;
        Anchor anchor = Anchor::raw;
    };
    using Representation = std::variant<ExplicitTable, MobiusCoeffs, Distorted>;

    Capacity(GroundSet ground, Representation repr, bool normalized);

    const GroundSet& ground() const { return ground_; }
    const Representation& representation() const { return repr_; }
    /// Claimed flag; validate() verifies it.
    bool normalized() const { return normalized_; }

    /// nu(A) for the subset addressed by `mask`.
    double value(Mask mask) const;

    /// All 2^n values as an explicit table (requires size <= kMaxExhaustive).
    std::vector<double> to_table() const;

    bool is_explicit() const { return std::holds_alternative<ExplicitTable>(repr_); }
    bool is_mobius() const { return std::holds_alternative<MobiusCoeffs>(repr_); }
    bool is_distorted() const { return std::holds_alternative<Distorted>(repr_); }

private:
    GroundSet ground_;
    Representation repr_;
    bool normalized_;
};

/// Distorted capacity with base measure m(A) = |A|/n. `raw` reproduces the
/// paper-replication numbers (normalized = false); `anchored` rescales so
/// nu(empty) = 0, nu(X) = 1 (normalized = true).
Capacity make_sigmoid_capacity(const GroundSet& ground, const SigmoidDistortion& params,
                               Anchor anchor);

/// Additive capacity nu(A) = |A|/n.
Capacity make_uniform_capacity(const GroundSet& ground);

Capacity make_explicit_capacity(const GroundSet& ground, std::vector<double> values,
                                bool normalized);

Capacity make_mobius_capacity(const GroundSet& ground, std::vector<double> coeffs,
                              bool normalized);

/// Exhaustive validity check (n <= 20): groundedness, normalization, and
/// monotonicity over all covering pairs (sufficient for full monotonicity).
ValidityReport validate(const Capacity& capacity, double tol = 1e-12);

/// Möbius coefficients m(.) of the capacity, indexed by subset bitmask;
/// nu(A) = sum_{B subseteq A} m(B) holds exactly up to rounding.
std::vector<double> mobius_transform(const Capacity& capacity);

/// Shapley importance of each element; sum equals nu(X) - nu(empty).
std::vector<double> shapley_values(const Capacity& capacity);

struct TruncationResult {
    Capacity capacity;
    ValidityReport validity;  // monotonicity may fail after truncation
};

/// Zero all Möbius coefficients of subsets larger than k and rebuild.
TruncationResult k_additive_truncate(const Capacity& capacity, int k);

}  // namespace nadid
