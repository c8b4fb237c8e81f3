#pragma once

#include "ewalign/core.hpp"

namespace ewalign {

struct OtResult {
    Coupling plan;
    double cost = 0.0;
    int iterations = 0;
    bool converged = true;
    double marginal_violation = 0.0;
};

// Exact optimal transport via successive shortest paths with potentials on the
// complete bipartite graph; returns an optimal vertex solution.
// Guarded to n*m <= 250000.
OtResult exact_ot(const Matrix& cost, const Vector& a, const Vector& b);

struct SinkhornOptions {
    double epsilon = 1e-2;
    double tol = 1e-7;
    int max_iter = 10000;
    bool log_domain = true;  // raw-kernel mode exists only for cross-checking
};

// Entropic OT; plan = diag(u) K diag(v) with K = exp(-C/eps).  Convergence is
// measured as the L-inf marginal violation.  Non-convergence is a soft flag on
// the result.
OtResult sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                  const SinkhornOptions& opts);

// Log-domain Sinkhorn core with dual warm starts, shared by the GW solvers.
// On return f and g hold the final potentials; plan(i,j) = exp((f_i + g_j - C_ij)/eps).
struct SinkhornCoreResult {
    int iterations = 0;
    double violation = 0.0;
    bool converged = false;
};
SinkhornCoreResult log_sinkhorn_core(const Matrix& cost, const Vector& a, const Vector& b,
                                     double epsilon, double tol, int max_iter, Vector& f,
                                     Vector& g);
Matrix plan_from_potentials(const Matrix& cost, const Vector& f, const Vector& g, double epsilon);

enum class W2Method { Exact, Entropic };

// sqrt of the optimal <gamma, d_Z^2>.
double wasserstein2(const ReferenceSpace& space, const SimplexWeights& mu1,
                    const SimplexWeights& mu2, W2Method method, double epsilon = 1e-3);

// Exact W2 between two measures on the same equiangular unit-circle bins,
// computed by cyclic monotone rearrangement over all cut points.
double circular_w2(const Vector& mu, const Vector& nu);

}  // namespace ewalign
