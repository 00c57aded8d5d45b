#pragma once

#include <functional>
#include <vector>

#include "nadid/capacity.hpp"
#include "nadid/ground_set.hpp"

namespace nadid {

/// Real-valued function on a ground set: values[i] = f(labels()[i]).
/// Values must be finite.
struct ValuedFunction {
    GroundSet ground;
    std::vector<double> values;

    ValuedFunction(GroundSet g, std::vector<double> v);
};

/// Choquet integral, canonical increment form:
///   sum_i (f(x_(i)) - f(x_(i-1))) * nu(A_(i)),  f(x_(0)) = 0,
/// with x_(1) <= ... <= x_(n) an ascending stable sort and A_(i) the upper
/// set {x_(i), ..., x_(n)}. Applied verbatim to signed vectors, which yields
/// the translation-covariant (asymmetric) integral.
double choquet(const ValuedFunction& f, const Capacity& capacity);

/// Listing-compatible Choquet variant: sort values ascending, set weights
/// w_i = g(i/n), return f_(1)*w_1 + sum_{i>=2} f_(i)*(w_i - w_{i-1}).
/// Not translation-covariant in general; kept because it produced the
/// published replication number.
double choquet_listing(const std::vector<double>& values,
                       const std::function<double(double)>& distortion);

/// Sugeno integral: max over non-empty A of min(min_{x in A} f(x), nu(A)),
/// by exhaustive enumeration (n <= 20).
double sugeno(const ValuedFunction& f, const Capacity& capacity);

}  // namespace nadid
