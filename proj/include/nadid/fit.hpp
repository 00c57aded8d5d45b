#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nadid/capacity.hpp"
#include "nadid/integrals.hpp"
#include "nadid/quadprog.hpp"

namespace nadid {

/// One observation for capacity estimation: criteria vector f and the
/// observed aggregate score e.
struct Sample {
    ValuedFunction f;
    double target = 0.0;
};

/// The restricted quadratic program over capacity values u (length 2^n,
/// indexed by subset bitmask): min 0.5 u'Du + r'u with D = sum c_i c_i',
/// r = -sum e_i c_i built from the Choquet increment coefficients, subject
/// to covering-pair monotonicity and nu(empty) = 0, nu(X) = 1.
struct QpProblem {
    GroundSet ground;
    Eigen::SparseMatrix<double> D;
    Eigen::VectorXd r;
    /// All covering pairs (A, A ∪ {x}), x ∉ A, encoding nu(A) - nu(B) <= 0.
    std::vector<std::pair<Mask, Mask>> monotonicity_pairs;
    double epsilon = 1e-9;  // ridge added to D so the optimum is unique
    double targets_sq_sum = 0.0;  // sum e_i^2, to recover the data SSE

    QpProblem(GroundSet g, Eigen::SparseMatrix<double> d, Eigen::VectorXd rvec,
              std::vector<std::pair<Mask, Mask>> pairs, double eps, double sq);
};

struct FitResult {
    Capacity capacity;
    double objective = 0.0;     // sum of squared prediction residuals
    double kkt_residual = 0.0;
    int iterations = 0;
    int active_constraints = 0;
};

/// Choquet increment coefficients of one sample: prediction = sum over the
/// chain of upper sets of (f_(j) - f_(j-1)) * u[mask(A_(j))].
std::vector<std::pair<Mask, double>> choquet_coefficients(const ValuedFunction& f);

QpProblem build_qp(const std::vector<Sample>& samples, double epsilon = 1e-9);

/// Solve the full 2^n-variable program. `start` is an optional warm start
/// over all 2^n coordinates (the optimum does not depend on it).
FitResult solve_qp(const QpProblem& problem, double tol = 1e-8,
                   const std::optional<std::vector<double>>& start = std::nullopt);

/// Symmetric reduction: capacity value depends only on |A|; decision vector
/// is the chain mu(0/n) <= ... <= mu(n/n) with mu(0)=0, mu(n)=1 pinned.
/// `start_levels`, when given, must hold n+1 values and seeds the solver.
FitResult fit_symmetric(const std::vector<Sample>& samples, double tol = 1e-8,
                        const std::optional<std::vector<double>>& start_levels = std::nullopt,
                        double epsilon = 1e-9);

/// k-additive reduction: decision variables are the Möbius coefficients of
/// subsets with 1 <= |B| <= k; monotonicity is enforced on covering pairs in
/// Möbius coordinates and sum m(B) = 1 normalizes.
FitResult fit_k_additive(const std::vector<Sample>& samples, int k, double tol = 1e-8,
                         double epsilon = 1e-9);

/// Predicted Choquet scores of `samples` under `capacity` (diagnostics).
std::vector<double> predict(const Capacity& capacity, const std::vector<Sample>& samples);

/// Samples CSV: header f_1,..,f_n,target.
std::vector<Sample> read_samples_csv(std::istream& in);
std::vector<Sample> read_samples_csv_file(const std::string& path);

}  // namespace nadid
