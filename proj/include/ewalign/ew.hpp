#pragma once

#include "ewalign/core.hpp"

namespace ewalign {

enum class ChainInit { Product };

struct EwConfig {
    double lambda = 100.0;
    double epsilon = 1e-3;
    int bcd_iters = 40;
    double sinkhorn_tol = 1e-7;
    int sinkhorn_max_iter = 10000;
    ChainInit init = ChainInit::Product;
    // Optional coarse-to-fine continuation: run short warm-up rounds at
    // geometrically larger epsilon before the recorded fixed-epsilon run.
    // 0 keeps the plain product-initialized scheme.
    int anneal_stages = 0;
};

void validate_ew_config(const EwConfig& cfg);

// The three partial costs of the effective cost on X1 x Z1 x Z2 x X2:
//   c(x1,z1,z2,x2) = a(x1,z1) + b(z1,z2) + c(z2,x2).
struct ChainCosts {
    Matrix a;  // n1 x m
    Matrix b;  // m x m
    Matrix c;  // m x n2
};

// Pairwise projections of a chain plan, computed by chain contraction.
struct ChainMarginals {
    Matrix pi;      // m x m
    Matrix gamma1;  // n1 x m
    Matrix gamma2;  // n2 x m
    Vector mu1;     // m
    Vector mu2;     // m
};

struct ChainSolveResult {
    ChainPlan plan;
    int iterations = 0;
    double violation = 0.0;
    bool converged = false;
};

// Effective cost of the bi-convex half-step given the fixed plan:
// b = d_Z^2 / 2, a and c are lambda-weighted linearized GW costs against the
// fixed plan's X_i x Z_i marginals.
ChainCosts effective_costs(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                           const ChainPlan& fixed, double lambda);

// Unbalanced multi-marginal Sinkhorn on the chain: only the X1 and X2
// marginals are constrained, the Z marginals are free.  Log-domain updates
//   u1 <- xi1 / (K1 (K2 (K3 u2))),  u2 <- xi2 / (K3' (K2' (K1' u1))).
// Optional warm starts reuse scalings from a previous half-step.
ChainSolveResult mm_sinkhorn_chain(const ChainCosts& costs, const SimplexWeights& xi1,
                                   const SimplexWeights& xi2, double epsilon, double tol,
                                   int max_iter, const Vector* warm_log_u1 = nullptr,
                                   const Vector* warm_log_u2 = nullptr);

// Product plan xi1 (x) mu (x) mu (x) xi2 with mu uniform on Z, as a chain plan.
ChainPlan product_chain_plan(const SimplexWeights& xi1, const SimplexWeights& xi2,
                             Eigen::Index m, double epsilon);

ChainMarginals extract(const ChainPlan& plan);

// Unregularized objective
//   F = <pi, d_Z^2> + lambda (G_{X1,Z}(gamma1) + G_{X2,Z}(gamma2)).
// Requires the Z marginals of pi and gamma_i to agree within tolerance.
double objective_f(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                   const Matrix& pi, const Matrix& gamma1, const Matrix& gamma2, double lambda,
                   double consistency_tol = 1e-6);

// Bilinear relaxation value between the marginals of two plans.
double bilinear_f(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                  const ChainMarginals& m1, const ChainMarginals& m2, double lambda);

// KL(alpha | uniform reference) of a chain plan, from pairwise marginals.
double chain_kl_uniform(const ChainPlan& plan, const ChainMarginals& marg);

// Algorithm: block-coordinate descent on the bi-convex relaxation, one
// unbalanced chain Sinkhorn solve per half-step; returns the plan with the
// lower unregularized objective.
EmbedResult solve_ew_lambda(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                            const EwConfig& cfg);

// Exact EW by enumerating isometric relabelings of the supports into Z;
// test oracle, guarded by the enumeration bound.
double ew_exact_small(const MmSpace& x1, const MmSpace& x2, const ReferenceSpace& z,
                      double iso_tol = 1e-9, std::int64_t max_candidates = 1000000);

}  // namespace ewalign
