#include "ewalign/ot.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ewalign {

namespace {

constexpr double kMassTol = 1e-13;

void check_marginal_inputs(const Matrix& cost, const Vector& a, const Vector& b) {
    if (cost.rows() != a.size() || cost.cols() != b.size())
        throw Error(ErrorCode::SizeMismatch, "cost shape does not match marginals");
    if ((a.array() < 0.0).any() || (b.array() < 0.0).any())
        throw Error(ErrorCode::NegativeEntry, "marginals must be nonnegative");
    if (std::abs(a.sum() - b.sum()) > 1e-9)
        throw Error(ErrorCode::InfeasibleMarginals,
                    "marginal masses differ: " + std::to_string(a.sum()) + " vs " +
                        std::to_string(b.sum()));
}

}  // namespace

OtResult exact_ot(const Matrix& cost, const Vector& a, const Vector& b) {
    check_marginal_inputs(cost, a, b);
    const Eigen::Index n = cost.rows(), m = cost.cols();
    if (static_cast<double>(n) * static_cast<double>(m) > 250000.0)
        throw Error(ErrorCode::SizeBoundExceeded, "exact solver guard: n*m > 250000");

    // Shift costs to be nonnegative so zero potentials are dual feasible; the
    // shift does not change the optimal plan (total mass is fixed).
    const double shift = std::min(0.0, cost.minCoeff());
    Matrix c = cost.array() - shift;

    Matrix flow = Matrix::Zero(n, m);
    Vector pot_src = Vector::Zero(n);    // potentials on supply nodes
    Vector pot_snk = Vector::Zero(m);    // potentials on demand nodes
    Vector surplus = a, deficit = b;

    const Eigen::Index nv = n + m;  // node u<n is source u, else sink u-n
    std::vector<double> dist(static_cast<size_t>(nv));
    std::vector<Eigen::Index> parent(static_cast<size_t>(nv));
    std::vector<char> done(static_cast<size_t>(nv));
    const double inf = std::numeric_limits<double>::infinity();

    const int max_augment = 50 * static_cast<int>(nv) + 64;
    int augments = 0;
    while (surplus.maxCoeff() > kMassTol) {
        if (++augments > max_augment)
            throw Error(ErrorCode::NumericalOverflow, "exact solver exceeded augmentation cap");

        std::fill(dist.begin(), dist.end(), inf);
        std::fill(parent.begin(), parent.end(), static_cast<Eigen::Index>(-1));
        std::fill(done.begin(), done.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i)
            if (surplus(i) > kMassTol) dist[static_cast<size_t>(i)] = 0.0;

        Eigen::Index goal = -1;
        while (true) {
            Eigen::Index u = -1;
            double best = inf;
            for (Eigen::Index v = 0; v < nv; ++v)
                if (!done[static_cast<size_t>(v)] && dist[static_cast<size_t>(v)] < best) {
                    best = dist[static_cast<size_t>(v)];
                    u = v;
                }
            if (u < 0) break;
            done[static_cast<size_t>(u)] = 1;
            if (u >= n && deficit(u - n) > kMassTol) {
                goal = u;
                break;
            }
            if (u < n) {
                for (Eigen::Index j = 0; j < m; ++j) {
                    const double rc = c(u, j) - pot_src(u) + pot_snk(j);
                    const double nd = dist[static_cast<size_t>(u)] + std::max(0.0, rc);
                    if (nd < dist[static_cast<size_t>(n + j)]) {
                        dist[static_cast<size_t>(n + j)] = nd;
                        parent[static_cast<size_t>(n + j)] = u;
                    }
                }
            } else {
                const Eigen::Index j = u - n;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (flow(i, j) <= kMassTol) continue;
                    const double rc = -c(i, j) + pot_src(i) - pot_snk(j);
                    const double nd = dist[static_cast<size_t>(u)] + std::max(0.0, rc);
                    if (nd < dist[static_cast<size_t>(i)]) {
                        dist[static_cast<size_t>(i)] = nd;
                        parent[static_cast<size_t>(i)] = u;
                    }
                }
            }
        }
        if (goal < 0)
            throw Error(ErrorCode::InfeasibleMarginals, "no augmenting path found");

        const double dgoal = dist[static_cast<size_t>(goal)];
        for (Eigen::Index i = 0; i < n; ++i)
            pot_src(i) -= std::min(dist[static_cast<size_t>(i)], dgoal);
        for (Eigen::Index j = 0; j < m; ++j)
            pot_snk(j) -= std::min(dist[static_cast<size_t>(n + j)], dgoal);

        // Trace back, find bottleneck, then apply.
        double amount = deficit(goal - n);
        for (Eigen::Index u = goal; parent[static_cast<size_t>(u)] >= 0;) {
            const Eigen::Index p = parent[static_cast<size_t>(u)];
            if (u >= n)  // forward arc p -> u
                ;        // no capacity bound
            else
                amount = std::min(amount, flow(u, p - n));
            u = p;
            if (parent[static_cast<size_t>(u)] < 0) amount = std::min(amount, surplus(u));
        }
        {
            Eigen::Index u = goal;
            while (parent[static_cast<size_t>(u)] >= 0) {
                const Eigen::Index p = parent[static_cast<size_t>(u)];
                if (u >= n)
                    flow(p, u - n) += amount;
                else
                    flow(u, p - n) -= amount;
                u = p;
            }
            surplus(u) -= amount;
        }
        deficit(goal - n) -= amount;
    }

    flow = flow.cwiseMax(0.0);
    OtResult res;
    // Marginals hold by construction; accept near-probability masses so that
    // solver-output weights (sum 1 up to the Sinkhorn tolerance) are usable.
    res.plan = Coupling{flow, SimplexWeights{a}, SimplexWeights{b}};
    res.cost = (flow.array() * cost.array()).sum();
    res.iterations = 0;  // exact solver reports no iterations
    res.converged = true;
    res.marginal_violation = coupling_marginal_violation(flow, a, b);
    return res;
}

SinkhornCoreResult log_sinkhorn_core(const Matrix& cost, const Vector& a, const Vector& b,
                                     double epsilon, double tol, int max_iter, Vector& f,
                                     Vector& g) {
    const Eigen::Index n = cost.rows(), m = cost.cols();
    if (f.size() != n) f = Vector::Zero(n);
    if (g.size() != m) g = Vector::Zero(m);
    const Vector la = safe_log(a), lb = safe_log(b);
    Matrix lk = -cost / epsilon;  // log kernel
    Vector tmp;

    SinkhornCoreResult out;
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        lse_rows(lk, g / epsilon, tmp);
        f = epsilon * (la - tmp).array();
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(la(i) > kNegInf)) f(i) = kNegInf;
        lse_cols(lk, f / epsilon, tmp);
        g = epsilon * (lb - tmp).array();
        for (Eigen::Index j = 0; j < m; ++j)
            if (!(lb(j) > kNegInf)) g(j) = kNegInf;

        // Column marginal is exact after the g update; check rows.
        lse_rows(lk, g / epsilon, tmp);
        double viol = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double row = (la(i) > kNegInf) ? std::exp(f(i) / epsilon + tmp(i)) : 0.0;
            viol = std::max(viol, std::abs(row - a(i)));
        }
        out.violation = viol;
        if (viol <= tol) {
            ++out.iterations;
            out.converged = true;
            break;
        }
    }
    return out;
}

Matrix plan_from_potentials(const Matrix& cost, const Vector& f, const Vector& g,
                            double epsilon) {
    const Eigen::Index n = cost.rows(), m = cost.cols();
    Matrix p(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = (f(i) + g(j) - cost(i, j)) / epsilon;
            p(i, j) = (e > kNegInf) ? std::exp(e) : 0.0;
        }
    return p;
}

namespace {

OtResult sinkhorn_raw(const Matrix& cost, const Vector& a, const Vector& b,
                      const SinkhornOptions& opts) {
    Matrix k = (-cost / opts.epsilon).array().exp();
    Vector u = Vector::Ones(a.size()), v = Vector::Ones(b.size());
    double viol = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        Vector kv = k * v;
        for (Eigen::Index i = 0; i < a.size(); ++i) u(i) = kv(i) > 0.0 ? a(i) / kv(i) : 0.0;
        Vector ktu = k.transpose() * u;
        for (Eigen::Index j = 0; j < b.size(); ++j) v(j) = ktu(j) > 0.0 ? b(j) / ktu(j) : 0.0;
        if (!u.allFinite() || !v.allFinite())
            throw Error(ErrorCode::NumericalOverflow, "scaling overflow with stabilization disabled");
        Vector rows = u.array() * (k * v).array();
        viol = (rows - a).cwiseAbs().maxCoeff();
        if (viol <= opts.tol) {
            ++it;
            break;
        }
    }
    Matrix p = u.asDiagonal() * k * v.asDiagonal();
    OtResult res;
    res.plan = Coupling{p, SimplexWeights{a}, SimplexWeights{b}};
    res.cost = (p.array() * cost.array()).sum();
    res.iterations = it;
    res.marginal_violation = viol;
    res.converged = viol <= opts.tol;
    return res;
}

}  // namespace

OtResult sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                  const SinkhornOptions& opts) {
    check_marginal_inputs(cost, a, b);
    if (!(opts.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (!opts.log_domain) return sinkhorn_raw(cost, a, b, opts);

    Vector f, g;
    SinkhornCoreResult core = log_sinkhorn_core(cost, a, b, opts.epsilon, opts.tol,
                                                opts.max_iter, f, g);
    Matrix p = plan_from_potentials(cost, f, g, opts.epsilon);
    OtResult res;
    res.plan = Coupling{p, SimplexWeights{a}, SimplexWeights{b}};
    res.cost = (p.array() * cost.array()).sum();
    res.iterations = core.iterations;
    res.marginal_violation = core.violation;
    res.converged = core.converged;
    return res;
}

double wasserstein2(const ReferenceSpace& space, const SimplexWeights& mu1,
                    const SimplexWeights& mu2, W2Method method, double epsilon) {
    if (mu1.size() != space.size() || mu2.size() != space.size())
        throw Error(ErrorCode::SizeMismatch, "weights do not match reference space");
    const Matrix cost = space.dist.d.array().square();
    double value;
    if (method == W2Method::Exact) {
        value = exact_ot(cost, mu1.w, mu2.w).cost;
    } else {
        SinkhornOptions opts;
        opts.epsilon = epsilon;
        opts.tol = 1e-9;
        value = sinkhorn(cost, mu1.w, mu2.w, opts).cost;
    }
    return std::sqrt(std::max(0.0, value));
}

namespace {

// Quantile coupling on the universal cover for a fixed mass shift alpha:
// mass at level s of mu pairs with the nu quantile at level s - alpha, where
// the nu quantile extends periodically (level + 1 <-> position + 2*pi).
double circular_shift_cost(const Vector& mu, const Vector& nu, const std::vector<double>& cum_mu,
                           const std::vector<double>& cum_nu, double alpha) {
    const Eigen::Index m = mu.size();
    const double two_pi = 2.0 * EIGEN_PI;
    const double step = two_pi / static_cast<double>(m);

    // nu level segments covering [0,1) for shifts alpha in [-1, 1): periodic
    // cover copies k = -1, 0, 1 in ascending level order.
    double cost = 0.0;
    Eigen::Index i = 0;  // mu segment [cum_mu[i], cum_mu[i+1]) at position step*i
    double lo_mu = 0.0;
    auto walk_copy = [&](int k) {
        for (Eigen::Index j = 0; j < m && i < m; ++j) {
            double lo = cum_nu[static_cast<size_t>(j)] + alpha + k;
            double hi = cum_nu[static_cast<size_t>(j + 1)] + alpha + k;
            if (hi <= 0.0) continue;
            lo = std::max(lo, 0.0);
            hi = std::min(hi, 1.0);
            if (hi <= lo) continue;
            const double pos_nu = step * static_cast<double>(j) + two_pi * k;
            while (i < m && lo_mu < hi) {
                const double hi_mu = cum_mu[static_cast<size_t>(i + 1)];
                const double overlap = std::min(hi, hi_mu) - std::max(lo, lo_mu);
                if (overlap > 0.0) {
                    const double diff = step * static_cast<double>(i) - pos_nu;
                    cost += overlap * diff * diff;
                }
                if (hi_mu <= hi) {
                    lo_mu = hi_mu;
                    ++i;
                } else {
                    break;
                }
            }
        }
    };
    walk_copy(-1);
    walk_copy(0);
    walk_copy(1);
    return cost;
}

}  // namespace

double circular_w2(const Vector& mu, const Vector& nu) {
    const Eigen::Index m = mu.size();
    if (nu.size() != m) throw Error(ErrorCode::SizeMismatch, "bin counts differ");
    if (std::abs(mu.sum() - 1.0) > 1e-9 || std::abs(nu.sum() - 1.0) > 1e-9)
        throw Error(ErrorCode::WeightsNotSimplex, "circular_w2 expects probability vectors");

    std::vector<double> cum_mu(static_cast<size_t>(m + 1), 0.0);
    std::vector<double> cum_nu(static_cast<size_t>(m + 1), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) {
        cum_mu[static_cast<size_t>(i + 1)] = cum_mu[static_cast<size_t>(i)] + mu(i);
        cum_nu[static_cast<size_t>(i + 1)] = cum_nu[static_cast<size_t>(i)] + nu(i);
    }
    cum_mu[static_cast<size_t>(m)] = 1.0;
    cum_nu[static_cast<size_t>(m)] = 1.0;

    // The cost is piecewise linear and convex in the shift, so the minimum is
    // attained where a mu level boundary aligns with a shifted nu level
    // boundary.  Shifts cover [-1, 1): the cost is not periodic in alpha.
    std::vector<double> candidates;
    candidates.reserve(2 * static_cast<size_t>(m * m) + 1);
    candidates.push_back(0.0);
    for (Eigen::Index i = 1; i <= m; ++i)
        for (Eigen::Index j = 1; j <= m; ++j) {
            double a = cum_mu[static_cast<size_t>(i)] - cum_nu[static_cast<size_t>(j)];
            a -= std::floor(a);
            candidates.push_back(a);
            candidates.push_back(a - 1.0);
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                     candidates.end());

    double best = std::numeric_limits<double>::infinity();
    for (double alpha : candidates)
        best = std::min(best, circular_shift_cost(mu, nu, cum_mu, cum_nu, alpha));
    return std::sqrt(std::max(0.0, best));
}

}  // namespace ewalign
