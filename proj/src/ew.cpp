#include "ewalign/ew.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "ewalign/gw.hpp"
#include "ewalign/ot.hpp"

namespace ewalign {

void validate_ew_config(const EwConfig& cfg) {
    if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be positive");
    if (!(cfg.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (cfg.bcd_iters < 1) throw Error(ErrorCode::InvalidConfig, "bcd_iters must be at least 1");
    if (!(cfg.sinkhorn_tol > 0.0))
        throw Error(ErrorCode::InvalidConfig, "sinkhorn_tol must be positive");
    if (cfg.sinkhorn_max_iter < 1)
        throw Error(ErrorCode::InvalidConfig, "sinkhorn_max_iter must be at least 1");
}

ChainCosts effective_costs(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                           const ChainPlan& fixed, double lambda) {
    if (fixed.n1() != x1.size() || fixed.n2() != x2.size() || fixed.m() != z.size())
        throw Error(ErrorCode::SizeMismatch, "fixed plan does not match the input spaces");
    if (lambda < 0.0) throw Error(ErrorCode::InvalidConfig, "lambda must be nonnegative");
    const ChainMarginals marg = extract(fixed);
    ChainCosts costs;
    costs.b = 0.5 * z.dist.d.array().square();
    if (lambda == 0.0) {
        costs.a = Matrix::Zero(x1.size(), z.size());
        costs.c = Matrix::Zero(z.size(), x2.size());
    } else {
        costs.a = lambda * gw_linearized_cost(x1.dist, z.dist, marg.gamma1);
        costs.c = (lambda * gw_linearized_cost(x2.dist, z.dist, marg.gamma2)).transpose();
    }
    return costs;
}

ChainPlan product_chain_plan(const SimplexWeights& xi1, const SimplexWeights& xi2,
                             Eigen::Index m, double epsilon) {
    const Eigen::Index n1 = xi1.size(), n2 = xi2.size();
    ChainPlan plan;
    plan.epsilon = epsilon;
    const double lm = std::log(static_cast<double>(m));
    plan.log_k1 = Matrix::Constant(n1, m, -std::log(static_cast<double>(n1)) - lm);
    plan.log_k2 = Matrix::Constant(m, m, -lm);
    plan.log_k3 = Matrix::Constant(m, n2, -std::log(static_cast<double>(n2)));
    plan.log_u1 = safe_log((xi1.w.array() * static_cast<double>(n1)).matrix());
    plan.log_u2 = safe_log((xi2.w.array() * static_cast<double>(n2)).matrix());
    return plan;
}

ChainSolveResult mm_sinkhorn_chain(const ChainCosts& costs, const SimplexWeights& xi1,
                                   const SimplexWeights& xi2, double epsilon, double tol,
                                   int max_iter, const Vector* warm_log_u1,
                                   const Vector* warm_log_u2) {
    const Eigen::Index n1 = costs.a.rows(), m = costs.a.cols(), n2 = costs.c.cols();
    if (costs.b.rows() != m || costs.b.cols() != m || costs.c.rows() != m)
        throw Error(ErrorCode::SizeMismatch, "chain cost shapes are inconsistent");
    if (xi1.size() != n1 || xi2.size() != n2)
        throw Error(ErrorCode::SizeMismatch, "marginals do not match chain costs");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (!costs.a.allFinite() || !costs.b.allFinite() || !costs.c.allFinite())
        throw Error(ErrorCode::NumericalOverflow, "chain costs must be finite");

    ChainPlan plan;
    plan.epsilon = epsilon;
    const double lm = std::log(static_cast<double>(m));
    plan.log_k1 = (-costs.a / epsilon).array() - std::log(static_cast<double>(n1)) - lm;
    plan.log_k2 = (-costs.b / epsilon).array() - lm;
    plan.log_k3 = (-costs.c / epsilon).array() - std::log(static_cast<double>(n2));

    const Vector lxi1 = safe_log(xi1.w), lxi2 = safe_log(xi2.w);
    // Transposed kernel copies keep every contraction on contiguous columns.
    const Matrix k1t = plan.log_k1.transpose();
    const Matrix k2t = plan.log_k2.transpose();
    const Matrix k3t = plan.log_k3.transpose();

    Vector lu1, lu2;
    bool have_u1 = false;
    if (warm_log_u1 && warm_log_u2) {
        lu1 = *warm_log_u1;
        lu2 = *warm_log_u2;
        have_u1 = true;
    } else {
        lu2 = Vector::Zero(n2);
    }

    Vector t3(m), t2(m), s1(n1), t1(m), r2(m), q3(n2);
    auto x1_violation = [&]() {
        double viol = 0.0;
        for (Eigen::Index i = 0; i < n1; ++i) {
            const double row = (lu1(i) > kNegInf) ? std::exp(lu1(i) + s1(i)) : 0.0;
            viol = std::max(viol, std::abs(row - xi1.w(i)));
        }
        return viol;
    };
    auto forward_pass = [&]() {
        lse_cols(k3t, lu2, t3);  // t3_k = LSE_l k3(k,l) + lu2_l
        lse_cols(k2t, t3, t2);   // t2_j = LSE_k k2(j,k) + t3_k
        lse_cols(k1t, t2, s1);   // s1_i = LSE_j k1(i,j) + t2_j
    };

    ChainSolveResult out;
    out.violation = std::numeric_limits<double>::infinity();
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        forward_pass();
        if (have_u1) {
            out.violation = x1_violation();
            if (out.violation <= tol) {
                out.converged = true;
                break;
            }
        }
        lu1 = lxi1 - s1;
        have_u1 = true;
        lse_cols(plan.log_k1, lu1, t1);
        lse_cols(plan.log_k2, t1, r2);
        lse_cols(plan.log_k3, r2, q3);
        lu2 = lxi2 - q3;
    }
    if (!out.converged) {
        forward_pass();
        out.violation = x1_violation();
        out.converged = out.violation <= tol;
    }
    plan.log_u1 = std::move(lu1);
    plan.log_u2 = std::move(lu2);
    out.plan = std::move(plan);
    return out;
}

ChainMarginals extract(const ChainPlan& plan) {
    const Eigen::Index n1 = plan.n1(), m = plan.m(), n2 = plan.n2();
    Vector t3(m), t2(m), t1(m), r2(m);
    lse_rows(plan.log_k3, plan.log_u2, t3);  // t3_k = LSE_l k3(k,l) + u2_l
    lse_rows(plan.log_k2, t3, t2);           // t2_j = LSE_k k2(j,k) + t3_k
    lse_cols(plan.log_k1, plan.log_u1, t1);  // t1_j = LSE_i k1(i,j) + u1_i
    lse_cols(plan.log_k2, t1, r2);           // r2_k = LSE_j k2(j,k) + t1_j

    ChainMarginals marg;
    marg.gamma1.resize(n1, m);
    marg.gamma2.resize(n2, m);
    marg.pi.resize(m, m);
    marg.mu1.resize(m);
    marg.mu2.resize(m);
    auto safe_exp = [](double x) { return (x > kNegInf) ? std::exp(x) : 0.0; };
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n1; ++i)
            marg.gamma1(i, j) = safe_exp(plan.log_u1(i) + plan.log_k1(i, j) + t2(j));
        for (Eigen::Index k = 0; k < m; ++k)
            marg.pi(j, k) = safe_exp(t1(j) + plan.log_k2(j, k) + t3(k));
        for (Eigen::Index l = 0; l < n2; ++l)
            marg.gamma2(l, j) = safe_exp(r2(j) + plan.log_k3(j, l) + plan.log_u2(l));
        marg.mu1(j) = safe_exp(t1(j) + t2(j));
        marg.mu2(j) = safe_exp(r2(j) + t3(j));
    }
    return marg;
}

double objective_f(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                   const Matrix& pi, const Matrix& gamma1, const Matrix& gamma2, double lambda,
                   double consistency_tol) {
    const Eigen::Index m = z.size();
    if (pi.rows() != m || pi.cols() != m || gamma1.cols() != m || gamma2.cols() != m ||
        gamma1.rows() != x1.size() || gamma2.rows() != x2.size())
        throw Error(ErrorCode::SizeMismatch, "objective inputs have inconsistent shapes");
    const Vector mu1_pi = pi.rowwise().sum();
    const Vector mu2_pi = pi.colwise().sum().transpose();
    const Vector mu1_g = gamma1.colwise().sum().transpose();
    const Vector mu2_g = gamma2.colwise().sum().transpose();
    const double mismatch = std::max((mu1_pi - mu1_g).cwiseAbs().maxCoeff(),
                                     (mu2_pi - mu2_g).cwiseAbs().maxCoeff());
    if (mismatch > consistency_tol)
        throw Error(ErrorCode::MarginalMismatch,
                    "pi and gamma marginals disagree by " + std::to_string(mismatch));
    const double w_term = (pi.array() * z.dist.d.array().square()).sum();
    const double gw_terms = gw_objective(x1.dist, z.dist, gamma1) +
                            gw_objective(x2.dist, z.dist, gamma2);
    return w_term + lambda * gw_terms;
}

double bilinear_f(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                  const ChainMarginals& m1, const ChainMarginals& m2, double lambda) {
    const Matrix dz_sq = z.dist.d.array().square();
    const double w_term = 0.5 * ((m1.pi.array() * dz_sq.array()).sum() +
                                 (m2.pi.array() * dz_sq.array()).sum());
    const double g1 =
        (gw_linearized_cost(x1.dist, z.dist, m1.gamma1).array() * m2.gamma1.array()).sum();
    const double g2 =
        (gw_linearized_cost(x2.dist, z.dist, m1.gamma2).array() * m2.gamma2.array()).sum();
    return w_term + lambda * (g1 + g2);
}

double chain_kl_uniform(const ChainPlan& plan, const ChainMarginals& marg) {
    const double log_ref = std::log(static_cast<double>(plan.n1())) +
                           2.0 * std::log(static_cast<double>(plan.m())) +
                           std::log(static_cast<double>(plan.n2()));
    double kl = masked_dot(marg.gamma1.rowwise().sum(), plan.log_u1) +
                masked_dot(marg.gamma2.rowwise().sum(), plan.log_u2);
    for (Eigen::Index j = 0; j < plan.m(); ++j) {
        for (Eigen::Index i = 0; i < plan.n1(); ++i)
            if (marg.gamma1(i, j) > 0.0) kl += marg.gamma1(i, j) * plan.log_k1(i, j);
        for (Eigen::Index k = 0; k < plan.m(); ++k)
            if (marg.pi(j, k) > 0.0) kl += marg.pi(j, k) * plan.log_k2(j, k);
        for (Eigen::Index l = 0; l < plan.n2(); ++l)
            if (marg.gamma2(l, j) > 0.0) kl += marg.gamma2(l, j) * plan.log_k3(j, l);
    }
    return kl + log_ref * marg.gamma1.sum();
}

EmbedResult solve_ew_lambda(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                            const EwConfig& cfg) {
    validate_ew_config(cfg);
    const Eigen::Index m = z.size();

    ChainPlan alpha1 = product_chain_plan(x1.weights, x2.weights, m, cfg.epsilon);
    ChainPlan alpha2 = alpha1;
    ChainMarginals marg1 = extract(alpha1);
    ChainMarginals marg2 = marg1;

    EmbedResult res;
    auto fvalue = [&](const ChainMarginals& mm) {
        return objective_f(x1, x2, z, mm.pi, mm.gamma1, mm.gamma2, cfg.lambda, 1e-6);
    };
    auto record = [&](bool updated_is_alpha2) {
        const double f1 = fvalue(marg1), f2 = fvalue(marg2);
        res.objective_trace.push_back(updated_is_alpha2 ? f2 : f1);
        res.regularized_trace.push_back(
            bilinear_f(x1, x2, z, marg1, marg2, cfg.lambda) +
            cfg.epsilon * (chain_kl_uniform(alpha1, marg1) + chain_kl_uniform(alpha2, marg2)));
        res.objective_trace_alpha1.push_back(f1);
        res.objective_trace_alpha2.push_back(f2);
    };

    // Inner warm starts, kept separate from the plans so stage transitions can
    // rescale the duals without touching a consistent plan object.
    Vector warm1_u1 = alpha1.log_u1, warm1_u2 = alpha1.log_u2;
    Vector warm2_u1 = alpha2.log_u1, warm2_u2 = alpha2.log_u2;

    auto bcd_round = [&](double eps, int iters, bool recorded) {
        for (int it = 0; it < iters; ++it) {
            {
                const ChainCosts costs = effective_costs(x1, x2, z, alpha1, cfg.lambda);
                ChainSolveResult sol =
                    mm_sinkhorn_chain(costs, x1.weights, x2.weights, eps, cfg.sinkhorn_tol,
                                      cfg.sinkhorn_max_iter, &warm2_u1, &warm2_u2);
                alpha2 = std::move(sol.plan);
                warm2_u1 = alpha2.log_u1;
                warm2_u2 = alpha2.log_u2;
                marg2 = extract(alpha2);
                if (recorded) {
                    res.sinkhorn_violations.push_back(sol.violation);
                    res.sinkhorn_iterations.push_back(sol.iterations);
                    record(true);
                }
            }
            {
                const ChainCosts costs = effective_costs(x1, x2, z, alpha2, cfg.lambda);
                ChainSolveResult sol =
                    mm_sinkhorn_chain(costs, x1.weights, x2.weights, eps, cfg.sinkhorn_tol,
                                      cfg.sinkhorn_max_iter, &warm1_u1, &warm1_u2);
                alpha1 = std::move(sol.plan);
                warm1_u1 = alpha1.log_u1;
                warm1_u2 = alpha1.log_u2;
                marg1 = extract(alpha1);
                if (recorded) {
                    res.sinkhorn_violations.push_back(sol.violation);
                    res.sinkhorn_iterations.push_back(sol.iterations);
                    record(false);
                }
            }
        }
    };

    // Optional warm-up at geometrically larger epsilon; the recorded run below
    // is a plain fixed-epsilon block-coordinate descent either way.
    for (int stage = cfg.anneal_stages; stage >= 1; --stage) {
        const double eps = cfg.epsilon * std::pow(6.0, stage);
        const double eps_next = cfg.epsilon * std::pow(6.0, stage - 1);
        bcd_round(eps, std::max(4, cfg.bcd_iters / 4), false);
        const double ratio = eps / eps_next;
        warm1_u1 *= ratio;
        warm1_u2 *= ratio;
        warm2_u1 *= ratio;
        warm2_u2 *= ratio;
    }
    bcd_round(cfg.epsilon, cfg.bcd_iters, true);

    const double f1 = res.objective_trace_alpha1.back();
    const double f2 = res.objective_trace_alpha2.back();
    const bool pick1 = f1 <= f2;
    const ChainMarginals& sel = pick1 ? marg1 : marg2;
    res.selected_plan = pick1 ? 1 : 2;
    res.final_objective = pick1 ? f1 : f2;
    res.iterations = cfg.bcd_iters;

    // Convergence: relative change of the same plan's objective across one
    // outer iteration (the trace alternates between the two plans).
    const size_t steps = res.objective_trace.size();
    if (steps >= 4) {
        const double last = res.objective_trace[steps - 1];
        const double prev = res.objective_trace[steps - 3];
        const double last2 = res.objective_trace[steps - 2];
        const double prev2 = res.objective_trace[steps - 4];
        res.converged = std::abs(last - prev) <= 1e-8 * std::max(1.0, std::abs(last)) &&
                        std::abs(last2 - prev2) <= 1e-8 * std::max(1.0, std::abs(last2));
    }

    res.pi = Coupling{sel.pi, SimplexWeights{sel.mu1}, SimplexWeights{sel.mu2}};
    res.gamma1 = Coupling{sel.gamma1, x1.weights, SimplexWeights{sel.mu1}};
    res.gamma2 = Coupling{sel.gamma2, x2.weights, SimplexWeights{sel.mu2}};
    res.mu1 = SimplexWeights{sel.mu1};
    res.mu2 = SimplexWeights{sel.mu2};
    return res;
}

namespace {

// All injective distance-preserving relabelings of x into z, deduplicated to
// the distinct pushforward weight vectors.
std::vector<Vector> isometric_pushforwards(const MmSpace& x, const ReferenceSpace& z,
                                           double iso_tol, std::int64_t max_candidates,
                                           std::int64_t& budget) {
    const Eigen::Index n = x.size(), m = z.size();
    std::vector<Eigen::Index> image(static_cast<size_t>(n), -1);
    std::vector<bool> used(static_cast<size_t>(m), false);
    std::set<std::vector<std::int64_t>> seen;
    std::vector<Vector> out;

    std::int64_t found = 0;
    auto push = [&]() {
        Vector mu = Vector::Zero(m);
        for (Eigen::Index i = 0; i < n; ++i) mu(image[static_cast<size_t>(i)]) += x.weights.w(i);
        std::vector<std::int64_t> key(static_cast<size_t>(m));
        for (Eigen::Index j = 0; j < m; ++j)
            key[static_cast<size_t>(j)] = static_cast<std::int64_t>(std::llround(mu(j) * 1e12));
        if (seen.insert(std::move(key)).second) out.push_back(std::move(mu));
    };

    // DFS with pairwise distance pruning.
    std::function<void(Eigen::Index)> dfs = [&](Eigen::Index depth) {
        if (--budget < 0)
            throw Error(ErrorCode::EnumerationBoundExceeded,
                        "isometric embedding enumeration exceeds the bound");
        if (depth == n) {
            if (++found > max_candidates)
                throw Error(ErrorCode::EnumerationBoundExceeded,
                            "more candidate embeddings than allowed");
            push();
            return;
        }
        for (Eigen::Index cand = 0; cand < m; ++cand) {
            if (used[static_cast<size_t>(cand)]) continue;
            bool ok = true;
            for (Eigen::Index prev = 0; prev < depth; ++prev) {
                const double dz = z.dist.d(image[static_cast<size_t>(prev)], cand);
                if (std::abs(dz - x.dist.d(prev, depth)) > iso_tol) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            image[static_cast<size_t>(depth)] = cand;
            used[static_cast<size_t>(cand)] = true;
            dfs(depth + 1);
            used[static_cast<size_t>(cand)] = false;
            image[static_cast<size_t>(depth)] = -1;
        }
    };
    dfs(0);
    return out;
}

}  // namespace

double ew_exact_small(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                      double iso_tol, std::int64_t max_candidates) {
    std::int64_t budget = 50 * max_candidates + 1000000;
    const std::vector<Vector> push1 = isometric_pushforwards(x1, z, iso_tol, max_candidates, budget);
    const std::vector<Vector> push2 = isometric_pushforwards(x2, z, iso_tol, max_candidates, budget);
    if (push1.empty() || push2.empty())
        throw Error(ErrorCode::NoIsometricEmbedding,
                    "a support does not embed isometrically into Z");
    if (static_cast<std::int64_t>(push1.size()) * static_cast<std::int64_t>(push2.size()) >
        max_candidates)
        throw Error(ErrorCode::EnumerationBoundExceeded, "too many embedding pairs to evaluate");

    const Matrix cost = z.dist.d.array().square();
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& mu1 : push1)
        for (const Vector& mu2 : push2)
            best = std::min(best, exact_ot(cost, mu1, mu2).cost);
    return std::sqrt(std::max(0.0, best));
}

}  // namespace ewalign
