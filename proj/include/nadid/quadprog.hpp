#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>

namespace nadid {

/// Strictly convex quadratic program
///   min 0.5 x'Px + q'x   s.t.  Gx <= h,  Ex = e
/// with P symmetric positive definite (callers add a ridge when needed).
struct QuadProgData {
    Eigen::SparseMatrix<double> P;
    Eigen::VectorXd q;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    Eigen::SparseMatrix<double> E;
    Eigen::VectorXd e;
};

struct IpmResult {
    Eigen::VectorXd x;
    Eigen::VectorXd ineq_dual;  // z >= 0
    Eigen::VectorXd eq_dual;    // y
    int iterations = 0;
    double kkt_residual = 0.0;  // max of stationarity, feasibility, complementarity
    bool converged = false;
};

/// Primal-dual interior-point solver (Mehrotra predictor-corrector).
/// Deterministic given identical inputs; `x0` is only a starting point and
/// does not change the optimum. Returns the best iterate with converged=false
/// when the iteration cap is hit.
IpmResult solve_convex_qp(const QuadProgData& qp, double tol = 1e-9, int max_iterations = 200,
                          const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

}  // namespace nadid
