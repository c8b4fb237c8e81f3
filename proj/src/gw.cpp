#include "ewalign/gw.hpp"

#include <cmath>

#include "ewalign/ot.hpp"

namespace ewalign {

namespace {

void check_sizes(const DistanceMatrix& dx, const DistanceMatrix& dz, const Matrix& gamma) {
    if (gamma.rows() != dx.size() || gamma.cols() != dz.size())
        throw Error(ErrorCode::SizeMismatch, "coupling shape does not match distance matrices");
}

double effective_epsilon(const GwOptions& opts, const DistanceMatrix& dx,
                         const DistanceMatrix& dz) {
    if (!(opts.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (!opts.relative_epsilon) return opts.epsilon;
    const double scale = std::max(dx.d.maxCoeff(), dz.d.maxCoeff());
    return opts.epsilon * std::max(scale * scale, 1e-300);
}

// Epsilon continuation schedule, coarse to fine, ending at the target.
std::vector<double> anneal_schedule(const GwOptions& opts, double eps, double scale) {
    std::vector<double> stages;
    if (opts.anneal) {
        double coarse = 0.25 * std::max(scale * scale, 1e-300);
        while (coarse > 5.0 * eps && stages.size() < 8) {
            stages.push_back(coarse);
            coarse /= 5.0;
        }
    }
    stages.push_back(eps);
    return stages;
}

// KL(gamma | uniform) for a nonnegative matrix of total mass ~1.
double kl_uniform(const Matrix& gamma) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < gamma.cols(); ++j)
        for (Eigen::Index i = 0; i < gamma.rows(); ++i)
            if (gamma(i, j) > 0.0) s += gamma(i, j) * std::log(gamma(i, j));
    return s + std::log(static_cast<double>(gamma.rows() * gamma.cols())) * gamma.sum();
}

// Deterministic relative jitter: breaks ties on symmetric instances where the
// product coupling is an exact fixed point of the linearized iteration.
void jitter(Matrix& gamma, double phase) {
    const double amp = 1e-7;
    for (Eigen::Index j = 0; j < gamma.cols(); ++j)
        for (Eigen::Index i = 0; i < gamma.rows(); ++i)
            gamma(i, j) *= 1.0 + amp * std::sin(phase + 2.399963 * static_cast<double>(
                                                            i * gamma.cols() + j));
    gamma /= gamma.sum();
}

}  // namespace

Matrix gw_linearized_cost(const DistanceMatrix& dx, const DistanceMatrix& dz,
                          const Matrix& gamma) {
    check_sizes(dx, dz, gamma);
    const Vector p = gamma.rowwise().sum();
    const Vector q = gamma.colwise().sum().transpose();
    const Vector cx = dx.d.array().square().matrix() * p;  // n
    const Vector cz = dz.d.array().square().matrix() * q;  // m
    Matrix cost = (-2.0) * (dx.d * gamma * dz.d);
    cost.colwise() += cx;
    cost.rowwise() += cz.transpose();
    return cost;
}

double gw_objective(const DistanceMatrix& dx, const DistanceMatrix& dz, const Matrix& gamma) {
    check_sizes(dx, dz, gamma);
    const Vector p = gamma.rowwise().sum();
    const Vector q = gamma.colwise().sum().transpose();
    const double sq_x = p.dot(dx.d.array().square().matrix() * p);
    const double sq_z = q.dot(dz.d.array().square().matrix() * q);
    const double cross = (gamma.array() * (dx.d * gamma * dz.d).array()).sum();
    return sq_x + sq_z - 2.0 * cross;
}

GwResult gw_entropic(const MmSpace& x, const DistanceMatrix& z_dist,
                     const SimplexWeights& z_weights, const GwOptions& opts) {
    if (z_weights.size() != z_dist.size())
        throw Error(ErrorCode::SizeMismatch, "z weights do not match z distances");
    const double eps = effective_epsilon(opts, x.dist, z_dist);
    const double scale = std::max(x.dist.d.maxCoeff(), z_dist.d.maxCoeff());
    const Eigen::Index n = x.size(), m = z_dist.size();

    Matrix gamma = x.weights.w * z_weights.w.transpose();
    jitter(gamma, 0.3);
    Vector f = Vector::Zero(n), g = Vector::Zero(m);

    GwResult res;
    const std::vector<double> stages = anneal_schedule(opts, eps, scale);
    int total_iters = 0;
    for (size_t stage = 0; stage < stages.size(); ++stage) {
        const bool final_stage = stage + 1 == stages.size();
        const double stage_eps = stages[stage];
        double prev = std::numeric_limits<double>::infinity();
        int it = 0;
        const int budget = final_stage ? opts.max_iter : std::max(10, opts.max_iter / 4);
        for (; it < budget; ++it) {
            const Matrix lin = gw_linearized_cost(x.dist, z_dist, gamma);
            log_sinkhorn_core(lin, x.weights.w, z_weights.w, stage_eps, opts.sinkhorn_tol,
                              opts.sinkhorn_max_iter, f, g);
            Matrix gamma_new = plan_from_potentials(lin, f, g, stage_eps);
            const double reg = (lin.array() * gamma_new.array()).sum() +
                               stage_eps * (kl_uniform(gamma) + kl_uniform(gamma_new));
            if (final_stage) res.trace.push_back(reg);
            gamma = std::move(gamma_new);
            if (std::abs(prev - reg) <= opts.tol * std::max(1.0, std::abs(reg))) {
                ++it;
                if (final_stage) res.converged = true;
                break;
            }
            prev = reg;
        }
        total_iters += it;
    }
    res.iterations = total_iters;
    res.objective = gw_objective(x.dist, z_dist, gamma);
    res.coupling = Coupling{gamma, x.weights, z_weights};
    return res;
}

GwWeightsResult gw_approximation(const MmSpace& x, const ReferenceSpace& z,
                                 const GwOptions& opts) {
    const double eps = effective_epsilon(opts, x.dist, z.dist);
    const double scale = std::max(x.dist.d.maxCoeff(), z.dist.d.maxCoeff());
    const Eigen::Index n = x.size(), m = z.size();
    const Vector lxi = safe_log(x.weights.w);

    Matrix gamma = x.weights.w * Vector::Constant(m, 1.0 / static_cast<double>(m)).transpose();
    jitter(gamma, 0.7);

    GwWeightsResult res;
    const std::vector<double> stages = anneal_schedule(opts, eps, scale);
    int total_iters = 0;
    for (size_t stage = 0; stage < stages.size(); ++stage) {
        const bool final_stage = stage + 1 == stages.size();
        const double stage_eps = stages[stage];
        double prev = std::numeric_limits<double>::infinity();
        int it = 0;
        const int budget = final_stage ? opts.max_iter : std::max(10, opts.max_iter / 4);
        for (; it < budget; ++it) {
            const Matrix lin = gw_linearized_cost(x.dist, z.dist, gamma);
            // One-sided entropic projection: only the X marginal is constrained,
            // so the minimizer is a row softmax scaled to the weights.
            Matrix gamma_new(n, m);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!(lxi(i) > kNegInf)) {
                    gamma_new.row(i).setZero();
                    continue;
                }
                const auto row = (-lin.row(i).transpose().array()) / stage_eps;
                const double mx = row.maxCoeff();
                Vector e = (row - mx).exp();
                gamma_new.row(i) = (x.weights.w(i) / e.sum()) * e.transpose();
            }
            const double reg = (lin.array() * gamma_new.array()).sum() +
                               stage_eps * (kl_uniform(gamma) + kl_uniform(gamma_new));
            if (final_stage) res.trace.push_back(reg);
            gamma = std::move(gamma_new);
            if (std::abs(prev - reg) <= opts.tol * std::max(1.0, std::abs(reg))) {
                ++it;
                if (final_stage) res.converged = true;
                break;
            }
            prev = reg;
        }
        total_iters += it;
    }
    res.iterations = total_iters;
    res.objective = gw_objective(x.dist, z.dist, gamma);
    Vector zeta = gamma.colwise().sum().transpose();
    zeta = zeta.cwiseMax(0.0);
    zeta /= zeta.sum();
    res.weights = SimplexWeights{zeta};
    res.coupling1 = gamma;
    return res;
}

namespace {

// One semi-relaxed refresh: minimize <L(gamma), .> + eps KL over couplings
// with the X marginal fixed and a free Z marginal (row softmax).
Matrix free_marginal_step(const MmSpace& x, const DistanceMatrix& dz, const Matrix& gamma,
                          double eps) {
    const Matrix lin = gw_linearized_cost(x.dist, dz, gamma);
    Matrix out(gamma.rows(), gamma.cols());
    for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
        if (!(x.weights.w(i) > 0.0)) {
            out.row(i).setZero();
            continue;
        }
        const auto row = (-lin.row(i).transpose().array()) / eps;
        const double mx = row.maxCoeff();
        Vector e = (row - mx).exp();
        out.row(i) = (x.weights.w(i) / e.sum()) * e.transpose();
    }
    return out;
}

}  // namespace

GwWeightsResult gw_barycenter_fixed_support(const MmSpace& x1, const MmSpace& x2,
                                            const ReferenceSpace& z, const GwOptions& opts) {
    const Eigen::Index m = z.size();

    GwOptions inner = opts;
    inner.max_iter = std::max(40, opts.max_iter / 4);
    const double eps = std::max(effective_epsilon(opts, x1.dist, z.dist),
                                effective_epsilon(opts, x2.dist, z.dist));

    // Alternate full GW coupling solves at the current weights with
    // free-marginal refreshes, then average the two refreshed Z marginals.
    auto run_from = [&](Vector zeta, GwWeightsResult& res) {
        Matrix gamma1, gamma2;
        const int outer_budget = std::max(10, opts.max_iter / 8);
        int it = 0;
        for (; it < outer_budget; ++it) {
            const GwResult r1 = gw_entropic(x1, z.dist, SimplexWeights{zeta}, inner);
            const GwResult r2 = gw_entropic(x2, z.dist, SimplexWeights{zeta}, inner);
            gamma1 = free_marginal_step(x1, z.dist, r1.coupling.p, eps);
            gamma2 = free_marginal_step(x2, z.dist, r2.coupling.p, eps);
            res.trace.push_back(r1.objective + r2.objective);

            Vector zeta_new = 0.5 * (gamma1.colwise().sum() + gamma2.colwise().sum()).transpose();
            zeta_new = zeta_new.cwiseMax(0.0);
            zeta_new /= zeta_new.sum();
            const double change = (zeta_new - zeta).cwiseAbs().maxCoeff();
            zeta = std::move(zeta_new);
            if (change <= 1e-9) {
                res.converged = true;
                ++it;
                break;
            }
        }
        const GwResult f1 = gw_entropic(x1, z.dist, SimplexWeights{zeta}, opts);
        const GwResult f2 = gw_entropic(x2, z.dist, SimplexWeights{zeta}, opts);
        res.iterations += it;
        res.objective = f1.objective + f2.objective;
        res.weights = SimplexWeights{zeta};
        res.coupling1 = f1.coupling.p;
        res.coupling2 = f2.coupling.p;
    };

    // Multi-start over deterministic weight candidates; keep the best final
    // objective (the problem is non-convex in the weights).
    std::vector<Vector> starts;
    starts.push_back(Vector::Constant(m, 1.0 / static_cast<double>(m)));
    const Vector za = gw_approximation(x1, z, opts).weights.w;
    const Vector zb = gw_approximation(x2, z, opts).weights.w;
    starts.push_back(za);
    starts.push_back(zb);
    starts.push_back(0.5 * (za + zb));

    GwWeightsResult best;
    bool first = true;
    for (const Vector& start : starts) {
        GwWeightsResult res;
        run_from(start, res);
        if (first || res.objective < best.objective) {
            best = std::move(res);
            first = false;
        }
    }
    return best;
}

}  // namespace ewalign
