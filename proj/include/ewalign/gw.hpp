#pragma once

#include "ewalign/core.hpp"

namespace ewalign {

// Quadratic GW objective of a coupling,
//   G(gamma) = sum (d_X(i,i') - d_Z(j,j'))^2 gamma(i,j) gamma(i',j'),
// computed by the three-term expansion, never the O(n^2 m^2) loop.
double gw_objective(const DistanceMatrix& dx, const DistanceMatrix& dz, const Matrix& gamma);

// Linearized cost L(i',j') = sum_{i,j} (d_X(i,i') - d_Z(j,j'))^2 gamma(i,j),
// so that <gamma, L(gamma)> = G(gamma).
Matrix gw_linearized_cost(const DistanceMatrix& dx, const DistanceMatrix& dz,
                          const Matrix& gamma);

struct GwOptions {
    double epsilon = 1e-2;
    bool relative_epsilon = false;  // if set, epsilon scales with max(d)^2
    double tol = 1e-8;              // relative change of the regularized objective
    int max_iter = 200;
    double sinkhorn_tol = 1e-9;
    int sinkhorn_max_iter = 10000;
    // Coarse-to-fine continuation: start at a heavily smoothed problem and
    // shrink epsilon geometrically toward the target, warm-starting each
    // stage.  The reported trace covers the final stage.
    bool anneal = true;
};

struct GwResult {
    Coupling coupling;
    double objective = 0.0;  // unregularized G, recomputed from the coupling
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // regularized bi-convex value per outer iteration
};

// Entropic GW between x and (Z, d_Z, z_weights) with both marginals fixed,
// solved by block-coordinate descent on the bi-convex relaxation.
GwResult gw_entropic(const MmSpace& x, const DistanceMatrix& z_dist,
                     const SimplexWeights& z_weights, const GwOptions& opts);

struct GwWeightsResult {
    SimplexWeights weights;
    double objective = 0.0;
    Matrix coupling1;  // coupling(s) realizing the objective
    Matrix coupling2;  // empty for gw_approximation
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

// min over zeta of GW^2(x, (Z, d_Z, zeta)): semi-relaxed GW with only the
// X-marginal constrained; the returned weights are the free Z-marginal.
GwWeightsResult gw_approximation(const MmSpace& x, const ReferenceSpace& z,
                                 const GwOptions& opts);

// min over zeta of sum_i GW^2(x_i, (Z, d_Z, zeta)).  The shared free marginal
// is enforced through a three-marginal chain plan on X1 x Z x X2.
GwWeightsResult gw_barycenter_fixed_support(const MmSpace& x1, const MmSpace& x2,
                                            const ReferenceSpace& z, const GwOptions& opts);

}  // namespace ewalign
