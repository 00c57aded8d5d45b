#include "nadid/quadprog.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <vector>

#include "nadid/error.hpp"

namespace nadid {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

double kkt_residual(const QuadProgData& qp, const Vec& x, const Vec& z, const Vec& y,
                    const Vec& s) {
    Vec stat = qp.P * x + qp.q;
    if (qp.G.rows() > 0) stat += qp.G.transpose() * z;
    if (qp.E.rows() > 0) stat += qp.E.transpose() * y;
    double res = stat.lpNorm<Eigen::Infinity>();
    if (qp.E.rows() > 0) {
        res = std::max(res, (qp.E * x - qp.e).lpNorm<Eigen::Infinity>());
    }
    if (qp.G.rows() > 0) {
        res = std::max(res, (qp.G * x - qp.h).maxCoeff());
        res = std::max(res, (s.array() * z.array()).abs().maxCoeff());
    }
    return res;
}

// [P + G'WG  E'; E  0], W = diag(z ./ s).
SpMat assemble_kkt(const QuadProgData& qp, const Vec& w) {
    const Eigen::Index nx = qp.P.rows();
    const Eigen::Index ne = qp.E.rows();
    SpMat m = qp.P;
    if (qp.G.rows() > 0) {
        SpMat wg = w.asDiagonal() * qp.G;
        m = m + SpMat(qp.G.transpose() * wg);
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(m.nonZeros() + 2 * qp.E.nonZeros()));
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value());
        }
    }
    for (int k = 0; k < qp.E.outerSize(); ++k) {
        for (SpMat::InnerIterator it(qp.E, k); it; ++it) {
            trips.emplace_back(static_cast<int>(nx + it.row()), static_cast<int>(it.col()),
                               it.value());
            trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(nx + it.row()),
                               it.value());
        }
    }
    SpMat kkt(nx + ne, nx + ne);
    kkt.setFromTriplets(trips.begin(), trips.end());
    return kkt;
}

double max_step(const Vec& v, const Vec& dv) {
    // Largest alpha in (0,1] keeping v + alpha*dv > 0.
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
    }
    return alpha;
}

// Skip the dense polish above this size; the interior-point iterate stands.
constexpr Eigen::Index kPolishLimit = 2048;

// Active-set polish: once the interior-point method has identified which
// inequality constraints bind (z_i >= s_i at a small duality gap), solve the
// equality-constrained problem on that set exactly via a null-space method.
// Falls back silently when the polished point violates an inactive
// constraint or needs a negative multiplier.
bool polish(const QuadProgData& qp, IpmResult& result) {
    const Eigen::Index nx = qp.P.rows();
    const Eigen::Index ni = qp.G.rows();
    const Eigen::Index ne = qp.E.rows();
    if (nx > kPolishLimit) return false;

    std::vector<Eigen::Index> active;
    if (ni > 0) {
        const Vec slack = qp.h - qp.G * result.x;
        for (Eigen::Index i = 0; i < ni; ++i) {
            if (result.ineq_dual[i] >= slack[i]) active.push_back(i);
        }
    }
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());

    Eigen::MatrixXd constraints(ne + na, nx);
    Vec rhs(ne + na);
    constraints.topRows(ne) = Eigen::MatrixXd(qp.E);
    rhs.head(ne) = qp.e;
    const Eigen::MatrixXd g_dense = ni > 0 ? Eigen::MatrixXd(qp.G) : Eigen::MatrixXd();
    for (Eigen::Index k = 0; k < na; ++k) {
        constraints.row(ne + k) = g_dense.row(active[static_cast<std::size_t>(k)]);
        rhs[ne + k] = qp.h[active[static_cast<std::size_t>(k)]];
    }

    // Particular solution + kernel of the active constraint matrix (the
    // active rows can be redundant, e.g. a fully active lattice diamond).
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(constraints);
    const Vec x0 = cod.solve(rhs);
    if ((constraints * x0 - rhs).lpNorm<Eigen::Infinity>() > 1e-9) return false;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(constraints);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd kernel = lu.kernel();

    const Eigen::MatrixXd p_dense(qp.P);
    Vec x = x0;
    if (kernel.cols() > 0 && kernel.norm() > 0) {
        const Eigen::MatrixXd reduced = kernel.transpose() * p_dense * kernel;
        const Vec rhs_w = -kernel.transpose() * (p_dense * x0 + qp.q);
        const Vec w = reduced.ldlt().solve(rhs_w);
        x += kernel * w;
    }

    // Feasibility of the constraints that were declared inactive.
    if (ni > 0) {
        const Vec slack = qp.h - qp.G * x;
        if (slack.minCoeff() < -1e-9) return false;
    }

    // Multipliers from the stationarity condition, least squares.
    const Vec gradient = p_dense * x + qp.q;
    Vec multipliers;
    if (ne + na > 0) {
        multipliers = constraints.transpose()
                          .colPivHouseholderQr()
                          .solve(-gradient);
        for (Eigen::Index k = 0; k < na; ++k) {
            if (multipliers[ne + k] < -1e-8) return false;
        }
        if ((constraints.transpose() * multipliers + gradient).lpNorm<Eigen::Infinity>() >
            1e-8) {
            return false;
        }
    } else if (gradient.lpNorm<Eigen::Infinity>() > 1e-9) {
        return false;
    }

    Vec z = Vec::Zero(ni);
    for (Eigen::Index k = 0; k < na; ++k) {
        z[active[static_cast<std::size_t>(k)]] = std::max(0.0, multipliers[ne + k]);
    }
    Vec y = ne > 0 ? Vec(multipliers.head(ne)) : Vec();
    const Vec slack = ni > 0 ? Vec(qp.h - qp.G * x) : Vec();
    const double residual = kkt_residual(qp, x, z, y, slack.cwiseMax(0.0));
    if (residual > result.kkt_residual && residual > 1e-9) return false;

    result.x = x;
    result.ineq_dual = z;
    result.eq_dual = y;
    result.kkt_residual = residual;
    return true;
}

}  // namespace

IpmResult solve_convex_qp(const QuadProgData& qp, double tol, int max_iterations,
                          const std::optional<Eigen::VectorXd>& x0) {
    const Eigen::Index nx = qp.P.rows();
    const Eigen::Index ni = qp.G.rows();
    const Eigen::Index ne = qp.E.rows();
    if (qp.q.size() != nx || (ni > 0 && qp.h.size() != ni) || (ne > 0 && qp.e.size() != ne)) {
        throw ValidationError("quadratic program has inconsistent dimensions");
    }

    Vec x = x0.has_value() ? *x0 : Vec::Zero(nx);
    if (x.size() != nx) {
        throw ValidationError("starting point has wrong dimension");
    }
    Vec y = Vec::Zero(ne);
    Vec z = Vec::Ones(ni);
    Vec s(ni);
    if (ni > 0) {
        const Vec slack = qp.h - qp.G * x;
        for (Eigen::Index i = 0; i < ni; ++i) s[i] = std::max(slack[i], 1.0);
    }

    IpmResult best;
    best.x = x;
    best.ineq_dual = z;
    best.eq_dual = y;
    best.kkt_residual = kkt_residual(qp, x, z, y, s);

    Eigen::SparseLU<SpMat> lu;
    for (int iter = 0; iter < max_iterations; ++iter) {
        const double residual = kkt_residual(qp, x, z, y, s);
        if (residual < best.kkt_residual) {
            best.x = x;
            best.ineq_dual = z;
            best.eq_dual = y;
            best.kkt_residual = residual;
            best.iterations = iter;
        }
        if (residual <= tol) {
            best.converged = true;
            best.iterations = iter;
            polish(qp, best);
            return best;
        }

        Vec rd = qp.P * x + qp.q;
        if (ni > 0) rd += qp.G.transpose() * z;
        if (ne > 0) rd += qp.E.transpose() * y;
        const Vec re = ne > 0 ? Vec(qp.E * x - qp.e) : Vec();
        const Vec rp = ni > 0 ? Vec(qp.G * x + s - qp.h) : Vec();

        Vec w = ni > 0 ? Vec(z.array() / s.array()) : Vec();
        lu.compute(assemble_kkt(qp, w));
        if (lu.info() != Eigen::Success) {
            break;  // report the best iterate; caller checks `converged`
        }

        auto solve_step = [&](const Vec& rc) {
            Vec rhs(nx + ne);
            Vec top = -rd;
            if (ni > 0) {
                const Vec tmp = (rc.array() + z.array() * rp.array()) / s.array();
                top -= qp.G.transpose() * tmp;
            }
            rhs.head(nx) = top;
            if (ne > 0) rhs.tail(ne) = -re;
            const Vec sol = lu.solve(rhs);
            struct Step {
                Vec dx, dy, ds, dz;
            } step;
            step.dx = sol.head(nx);
            step.dy = ne > 0 ? Vec(sol.tail(ne)) : Vec();
            if (ni > 0) {
                step.ds = -rp - qp.G * step.dx;
                step.dz =
                    Vec((rc.array() - z.array() * step.ds.array()) / s.array());
            }
            return step;
        };

        if (ni == 0) {
            // Pure equality-constrained problem: one Newton solve lands on the optimum.
            const auto step = solve_step(Vec());
            x += step.dx;
            if (ne > 0) y += step.dy;
            continue;
        }

        const double mu = s.dot(z) / static_cast<double>(ni);

        // Predictor.
        const Vec rc_affine = -(s.array() * z.array()).matrix();
        const auto affine = solve_step(rc_affine);
        const double alpha_aff =
            std::min(max_step(s, affine.ds), max_step(z, affine.dz));
        const double mu_aff = (s + alpha_aff * affine.ds).dot(z + alpha_aff * affine.dz) /
                              static_cast<double>(ni);
        const double sigma = std::pow(mu_aff / mu, 3.0);

        // Corrector.
        const Vec rc = (sigma * mu - affine.ds.array() * affine.dz.array() -
                        s.array() * z.array())
                           .matrix();
        const auto step = solve_step(rc);
        const double alpha =
            0.99 * std::min(max_step(s, step.ds), max_step(z, step.dz));

        x += alpha * step.dx;
        s += alpha * step.ds;
        z += alpha * step.dz;
        if (ne > 0) y += alpha * step.dy;
        best.iterations = iter + 1;
    }

    const double residual = kkt_residual(qp, x, z, y, s);
    if (residual < best.kkt_residual) {
        best.x = x;
        best.ineq_dual = z;
        best.eq_dual = y;
        best.kkt_residual = residual;
    }
    polish(qp, best);
    best.converged = best.kkt_residual <= tol;
    return best;
}

}  // namespace nadid
