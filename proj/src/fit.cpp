#include "nadid/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include "nadid/detail/text.hpp"

namespace nadid {

namespace {

constexpr int kMaxFitSize = 12;  // 2^n decision variables beyond this is impractical

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

const GroundSet& common_ground(const std::vector<Sample>& samples) {
    if (samples.empty()) {
        throw ValidationError("capacity fitting needs at least one sample");
    }
    const GroundSet& ground = samples.front().f.ground;
    for (const auto& sample : samples) {
        if (sample.f.ground != ground) {
            throw ValidationError("samples use inconsistent ground sets");
        }
        if (!std::isfinite(sample.target)) {
            throw ValidationError("sample target is not finite");
        }
    }
    if (ground.size() > kMaxFitSize) {
        throw ValidationError("capacity fitting is capped at n = " +
                              std::to_string(kMaxFitSize) + " criteria; got " +
                              std::to_string(ground.size()));
    }
    return ground;
}

std::vector<std::pair<Mask, Mask>> covering_pairs(int n) {
    std::vector<std::pair<Mask, Mask>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) << (n > 0 ? n - 1 : 0));
    const Mask size = Mask{1} << n;
    for (Mask mask = 0; mask < size; ++mask) {
        for (int bit = 0; bit < n; ++bit) {
            const Mask step = Mask{1} << bit;
            if (!(mask & step)) pairs.emplace_back(mask, mask | step);
        }
    }
    return pairs;
}

int count_active(const SpMat& g, const Vec& h, const Vec& x, double threshold = 1e-6) {
    const Vec slack = h - g * x;
    int active = 0;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
        if (slack[i] <= threshold) ++active;
    }
    return active;
}

struct SolveOutcome {
    Vec x;
    double kkt = 0.0;
    int iterations = 0;
    int active = 0;
};

SolveOutcome run_ipm(const QuadProgData& qp, double tol, const std::optional<Vec>& start) {
    const double inner_tol = std::min(tol, 1e-9);
    const IpmResult res = solve_convex_qp(qp, inner_tol, 200, start);
    if (res.kkt_residual > tol) {
        throw SolverError("QP solver did not reach the KKT tolerance " +
                              detail::fmt_double(tol) + " within the iteration cap; best "
                              "residual " + detail::fmt_double(res.kkt_residual) + " after " +
                              std::to_string(res.iterations) + " iterations",
                          res.kkt_residual);
    }
    SolveOutcome out;
    out.x = res.x;
    out.kkt = res.kkt_residual;
    out.iterations = res.iterations;
    out.active = count_active(qp.G, qp.h, res.x);
    return out;
}

double data_sse(const SpMat& d, const Vec& r, const Vec& x, double targets_sq) {
    // sum (c_i'x - e_i)^2 = x'Dx + 2 r'x + sum e_i^2
    const double sse = x.dot(d * x) + 2.0 * r.dot(x) + targets_sq;
    return std::max(sse, 0.0);
}

// The ridge scales with the data so that duplicating the sample set scales
// the whole objective and leaves the minimizer untouched.
double effective_ridge(const SpMat& d, double epsilon) {
    double trace = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) trace += d.coeff(i, i);
    return epsilon * std::max(1.0, trace / static_cast<double>(d.rows()));
}

void add_ridge(SpMat& p, double amount) {
    SpMat identity(p.rows(), p.cols());
    identity.setIdentity();
    p = p + SpMat(amount * identity);
}

}  // namespace

std::vector<std::pair<Mask, double>> choquet_coefficients(const ValuedFunction& f) {
    const int n = f.ground.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return f.values[a] < f.values[b]; });
    std::vector<std::pair<Mask, double>> coeffs;
    coeffs.reserve(static_cast<std::size_t>(n));
    double prev = 0.0;
    Mask upper = f.ground.full_mask();
    for (int idx : order) {
        coeffs.emplace_back(upper, f.values[idx] - prev);
        prev = f.values[idx];
        upper &= ~(Mask{1} << idx);
    }
    return coeffs;
}

QpProblem::QpProblem(GroundSet g, Eigen::SparseMatrix<double> d, Eigen::VectorXd rvec,
                     std::vector<std::pair<Mask, Mask>> pairs, double eps, double sq)
    : ground(std::move(g)),
      D(std::move(d)),
      r(std::move(rvec)),
      monotonicity_pairs(std::move(pairs)),
      epsilon(eps),
      targets_sq_sum(sq) {}

QpProblem build_qp(const std::vector<Sample>& samples, double epsilon) {
    const GroundSet& ground = common_ground(samples);
    const int n = ground.size();
    const Eigen::Index dim = Eigen::Index{1} << n;

    std::vector<Triplet> d_trips;
    Vec r = Vec::Zero(dim);
    double targets_sq = 0.0;
    for (const auto& sample : samples) {
        const auto coeffs = choquet_coefficients(sample.f);
        for (const auto& [mask_a, ca] : coeffs) {
            for (const auto& [mask_b, cb] : coeffs) {
                d_trips.emplace_back(static_cast<int>(mask_a), static_cast<int>(mask_b),
                                     ca * cb);
            }
            r[static_cast<Eigen::Index>(mask_a)] -= sample.target * ca;
        }
        targets_sq += sample.target * sample.target;
    }
    SpMat d(dim, dim);
    d.setFromTriplets(d_trips.begin(), d_trips.end());
    return QpProblem(ground, std::move(d), std::move(r), covering_pairs(n), epsilon,
                     targets_sq);
}

FitResult solve_qp(const QpProblem& problem, double tol,
                   const std::optional<std::vector<double>>& start) {
    const int n = problem.ground.size();
    const Eigen::Index dim = Eigen::Index{1} << n;

    QuadProgData qp;
    qp.P = problem.D;
    add_ridge(qp.P, effective_ridge(problem.D, problem.epsilon));
    qp.q = problem.r;

    const auto& pairs = problem.monotonicity_pairs;
    std::vector<Triplet> g_trips;
    g_trips.reserve(pairs.size() * 2);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        g_trips.emplace_back(static_cast<int>(i), static_cast<int>(pairs[i].first), 1.0);
        g_trips.emplace_back(static_cast<int>(i), static_cast<int>(pairs[i].second), -1.0);
    }
    qp.G.resize(static_cast<Eigen::Index>(pairs.size()), dim);
    qp.G.setFromTriplets(g_trips.begin(), g_trips.end());
    qp.h = Vec::Zero(static_cast<Eigen::Index>(pairs.size()));

    std::vector<Triplet> e_trips{Triplet(0, 0, 1.0), Triplet(1, static_cast<int>(dim - 1), 1.0)};
    qp.E.resize(2, dim);
    qp.E.setFromTriplets(e_trips.begin(), e_trips.end());
    qp.e = Vec(2);
    qp.e << 0.0, 1.0;

    std::optional<Vec> x0;
    if (start.has_value()) {
        if (start->size() != static_cast<std::size_t>(dim)) {
            throw ValidationError("starting point must have 2^n entries");
        }
        x0 = Eigen::Map<const Vec>(start->data(), dim);
    } else {
        Vec uniform(dim);
        for (Eigen::Index mask = 0; mask < dim; ++mask) {
            uniform[mask] = static_cast<double>(popcount(static_cast<Mask>(mask))) / n;
        }
        x0 = std::move(uniform);
    }

    SolveOutcome out = run_ipm(qp, tol, x0);
    // The boundary coordinates are equality-constrained; snap them exactly.
    out.x[0] = 0.0;
    out.x[dim - 1] = 1.0;

    std::vector<double> table(out.x.data(), out.x.data() + dim);
    FitResult result{make_explicit_capacity(problem.ground, std::move(table),
                                            /*normalized=*/true),
                     data_sse(problem.D, problem.r, out.x, problem.targets_sq_sum), out.kkt,
                     out.iterations, out.active};
    return result;
}

FitResult fit_symmetric(const std::vector<Sample>& samples, double tol,
                        const std::optional<std::vector<double>>& start_levels,
                        double epsilon) {
    const GroundSet& ground = common_ground(samples);
    const int n = ground.size();
    const Eigen::Index dim = n + 1;  // levels mu(0/n) .. mu(n/n)

    std::vector<Triplet> d_trips;
    Vec r = Vec::Zero(dim);
    double targets_sq = 0.0;
    for (const auto& sample : samples) {
        const auto coeffs = choquet_coefficients(sample.f);
        // Upper set sizes run n, n-1, .., 1 along the chain.
        std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
        for (const auto& [mask, coeff] : coeffs) {
            c[static_cast<std::size_t>(popcount(mask))] += coeff;
        }
        for (Eigen::Index a = 0; a < dim; ++a) {
            if (c[a] == 0.0) continue;
            for (Eigen::Index b = 0; b < dim; ++b) {
                if (c[b] != 0.0) {
                    d_trips.emplace_back(static_cast<int>(a), static_cast<int>(b), c[a] * c[b]);
                }
            }
            r[a] -= sample.target * c[a];
        }
        targets_sq += sample.target * sample.target;
    }

    QuadProgData qp;
    qp.P.resize(dim, dim);
    qp.P.setFromTriplets(d_trips.begin(), d_trips.end());
    const double ridge = effective_ridge(qp.P, epsilon);
    add_ridge(qp.P, ridge);
    qp.q = r;

    std::vector<Triplet> g_trips;
    for (int k = 0; k < n; ++k) {  // mu(k) - mu(k+1) <= 0
        g_trips.emplace_back(k, k, 1.0);
        g_trips.emplace_back(k, k + 1, -1.0);
    }
    qp.G.resize(n, dim);
    qp.G.setFromTriplets(g_trips.begin(), g_trips.end());
    qp.h = Vec::Zero(n);

    std::vector<Triplet> e_trips{Triplet(0, 0, 1.0), Triplet(1, static_cast<int>(dim - 1), 1.0)};
    qp.E.resize(2, dim);
    qp.E.setFromTriplets(e_trips.begin(), e_trips.end());
    qp.e = Vec(2);
    qp.e << 0.0, 1.0;

    std::optional<Vec> x0;
    if (start_levels.has_value()) {
        if (start_levels->size() != static_cast<std::size_t>(dim)) {
            throw ValidationError("start_levels must hold n+1 values");
        }
        x0 = Eigen::Map<const Vec>(start_levels->data(), dim);
    } else {
        Vec levels(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            levels[k] = static_cast<double>(k) / n;
        }
        x0 = std::move(levels);
    }

    SolveOutcome out = run_ipm(qp, tol, x0);
    out.x[0] = 0.0;
    out.x[dim - 1] = 1.0;

    std::vector<double> table(ground.subset_count());
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        table[mask] = out.x[popcount(static_cast<Mask>(mask))];
    }
    Vec d_x = qp.P * out.x - ridge * out.x;  // recover D*x for the SSE
    const double sse = out.x.dot(d_x) + 2.0 * r.dot(out.x) + targets_sq;
    FitResult result{make_explicit_capacity(ground, std::move(table), /*normalized=*/true),
                     std::max(sse, 0.0), out.kkt, out.iterations, out.active};
    return result;
}

FitResult fit_k_additive(const std::vector<Sample>& samples, int k, double tol,
                         double epsilon) {
    const GroundSet& ground = common_ground(samples);
    const int n = ground.size();
    if (k < 1 || k > n) {
        throw ValidationError("k must lie in [1, n]; got k=" + std::to_string(k) +
                              ", n=" + std::to_string(n));
    }

    // Decision variables: Möbius coefficients of subsets with 1 <= |B| <= k.
    const Mask full = ground.full_mask();
    std::vector<Mask> var_masks;
    std::vector<Eigen::Index> var_index(static_cast<std::size_t>(full) + 1, -1);
    for (Mask mask = 1; mask <= full; ++mask) {
        if (popcount(mask) <= k) {
            var_index[static_cast<std::size_t>(mask)] =
                static_cast<Eigen::Index>(var_masks.size());
            var_masks.push_back(mask);
        }
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(var_masks.size());

    // Choquet in Möbius coordinates: prediction = sum_B m(B) * min_{x in B} f(x).
    std::vector<Triplet> d_trips;
    Vec r = Vec::Zero(dim);
    double targets_sq = 0.0;
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (const auto& sample : samples) {
        for (Eigen::Index v = 0; v < dim; ++v) {
            const Mask mask = var_masks[static_cast<std::size_t>(v)];
            double lo = std::numeric_limits<double>::infinity();
            for (int bit = 0; bit < n; ++bit) {
                if (mask & (Mask{1} << bit)) lo = std::min(lo, sample.f.values[bit]);
            }
            c[static_cast<std::size_t>(v)] = lo;
        }
        for (Eigen::Index a = 0; a < dim; ++a) {
            for (Eigen::Index b = 0; b < dim; ++b) {
                d_trips.emplace_back(static_cast<int>(a), static_cast<int>(b), c[a] * c[b]);
            }
            r[a] -= sample.target * c[a];
        }
        targets_sq += sample.target * sample.target;
    }

    QuadProgData qp;
    qp.P.resize(dim, dim);
    qp.P.setFromTriplets(d_trips.begin(), d_trips.end());
    const double ridge = effective_ridge(qp.P, epsilon);
    add_ridge(qp.P, ridge);
    qp.q = r;

    // Monotonicity on covering pairs, in Möbius coordinates:
    // nu(A|x) - nu(A) = sum_{B subseteq A|x, x in B, |B| <= k} m(B) >= 0.
    const auto pairs = covering_pairs(n);
    std::vector<Triplet> g_trips;
    for (std::size_t row = 0; row < pairs.size(); ++row) {
        const Mask a = pairs[row].first;
        const Mask x_bit = pairs[row].second ^ a;
        // B = {x} | C over submasks C of A with |C| <= k-1.
        for (Mask sub = a;; sub = (sub - 1) & a) {
            if (popcount(sub) <= k - 1) {
                const Eigen::Index v = var_index[static_cast<std::size_t>(sub | x_bit)];
                g_trips.emplace_back(static_cast<int>(row), static_cast<int>(v), -1.0);
            }
            if (sub == 0) break;
        }
    }
    qp.G.resize(static_cast<Eigen::Index>(pairs.size()), dim);
    qp.G.setFromTriplets(g_trips.begin(), g_trips.end());
    qp.h = Vec::Zero(static_cast<Eigen::Index>(pairs.size()));

    // Normalization: total Möbius mass is 1.
    std::vector<Triplet> e_trips;
    for (Eigen::Index v = 0; v < dim; ++v) e_trips.emplace_back(0, static_cast<int>(v), 1.0);
    qp.E.resize(1, dim);
    qp.E.setFromTriplets(e_trips.begin(), e_trips.end());
    qp.e = Vec::Ones(1);

    // Uniform additive start: mass 1/n on each singleton.
    Vec x0 = Vec::Zero(dim);
    for (Eigen::Index v = 0; v < dim; ++v) {
        if (popcount(var_masks[static_cast<std::size_t>(v)]) == 1) x0[v] = 1.0 / n;
    }

    SolveOutcome out = run_ipm(qp, tol, x0);

    std::vector<double> coeffs(ground.subset_count(), 0.0);
    for (Eigen::Index v = 0; v < dim; ++v) {
        coeffs[static_cast<std::size_t>(var_masks[static_cast<std::size_t>(v)])] = out.x[v];
    }
    Vec d_x = qp.P * out.x - ridge * out.x;
    const double sse = out.x.dot(d_x) + 2.0 * r.dot(out.x) + targets_sq;
    FitResult result{make_mobius_capacity(ground, std::move(coeffs), /*normalized=*/true),
                     std::max(sse, 0.0), out.kkt, out.iterations, out.active};
    return result;
}

std::vector<double> predict(const Capacity& capacity, const std::vector<Sample>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& sample : samples) {
        out.push_back(choquet(sample.f, capacity));
    }
    return out;
}

std::vector<Sample> read_samples_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw ValidationError("samples CSV is empty");
    }
    const auto names = detail::split_csv_line(header);
    if (names.size() < 2 || names.back() != "target") {
        throw ValidationError("samples CSV must end with a 'target' column");
    }
    const int n = static_cast<int>(names.size()) - 1;
    for (int i = 0; i < n; ++i) {
        const std::string expected = "f_" + std::to_string(i + 1);
        if (names[static_cast<std::size_t>(i)] != expected) {
            throw ValidationError("samples CSV column " + std::to_string(i + 1) +
                                  " must be named '" + expected + "', found '" +
                                  names[static_cast<std::size_t>(i)] + "'");
        }
    }
    const GroundSet ground = GroundSet::indexed(n);
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != names.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(names.size()) + " fields, found " +
                                  std::to_string(fields.size()));
        }
        std::vector<double> values(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            values[static_cast<std::size_t>(i)] =
                detail::parse_double(fields[static_cast<std::size_t>(i)], names[i], line_no);
        }
        const double target = detail::parse_double(fields.back(), "target", line_no);
        samples.push_back(Sample{ValuedFunction(ground, std::move(values)), target});
    }
    if (samples.empty()) {
        throw ValidationError("samples CSV has a header but no rows");
    }
    return samples;
}

std::vector<Sample> read_samples_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open samples CSV '" + path + "' for reading");
    }
    try {
        return read_samples_csv(in);
    } catch (const ValidationError& err) {
        throw ValidationError(path + ": " + err.what());
    }
}

}  // namespace nadid
