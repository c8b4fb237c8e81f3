#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewalign/logsum.hpp"

namespace ewalign {

enum class ErrorCode {
    AsymmetricMatrix,
    NegativeEntry,
    NonzeroDiagonal,
    WeightsNotSimplex,
    TriangleViolation,
    SizeMismatch,
    SizeBoundExceeded,
    InfeasibleMarginals,
    NumericalOverflow,
    DegenerateExtent,
    DisconnectedGraph,
    ConstantFeatureRow,
    KTooLarge,
    IndexOutOfRange,
    NotPositiveDefinite,
    MarginalMismatch,
    NoIsometricEmbedding,
    EnumerationBoundExceeded,
    UnsupportedGeometry,
    AllMassZero,
    CountMismatch,
    IncompatibleCorpus,
    InvalidConfig,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Probability weights on a finite set.
struct SimplexWeights {
    Vector w;
    Eigen::Index size() const { return w.size(); }
};

SimplexWeights validate_simplex_weights(const Vector& w, double tol = 1e-9);
SimplexWeights uniform_weights(Eigen::Index n);

// Symmetric nonnegative matrix with zero diagonal.  Triangle inequality
// validation is opt-in (O(n^3)); k-NN derived dissimilarities may violate it
// slightly and are still accepted.
struct DistanceMatrix {
    Matrix d;
    Eigen::Index size() const { return d.rows(); }
};

DistanceMatrix validate_distance_matrix(const Matrix& d, bool check_triangle = false,
                                        double triangle_tol = 1e-9);
// Returns the largest triangle-inequality violation d(i,k) - d(i,j) - d(j,k).
double max_triangle_violation(const Matrix& d);

// Finite metric measure space.
struct MmSpace {
    DistanceMatrix dist;
    SimplexWeights weights;
    std::vector<int> labels;  // optional class ids, empty or size n
    Eigen::Index size() const { return dist.size(); }
};

MmSpace validate_mm_space(const Matrix& dist, const Vector& weights,
                          const std::vector<int>& labels = {}, bool check_triangle = false);

enum class Geometry { EuclideanGrid, SphereGrid, TorusGrid, GaussianW2, Custom };

const char* geometry_name(Geometry g);

// Fixed target space.  `points` holds per-point chart coordinates:
// grid coordinates for euclidean grids, (theta, phi) for sphere grids,
// per-axis angles for torus grids, (mean_x, mean_y, s11, s12, s22) for
// Gaussian grids.  `periodic` marks chart axes wrapping with period 2*pi.
struct ReferenceSpace {
    DistanceMatrix dist;
    Matrix points;
    Geometry geometry = Geometry::Custom;
    std::vector<bool> periodic;
    Eigen::Index size() const { return dist.size(); }
    double diameter() const { return dist.d.maxCoeff(); }
};

ReferenceSpace validate_reference_space(ReferenceSpace space, double tol = 1e-9);

// Two-marginal transport plan with declared marginals.
struct Coupling {
    Matrix p;
    SimplexWeights row_marginal;
    SimplexWeights col_marginal;
    Eigen::Index rows() const { return p.rows(); }
    Eigen::Index cols() const { return p.cols(); }
};

Coupling validate_coupling(const Matrix& p, const Vector& row_marginal,
                           const Vector& col_marginal, double marginal_tol);
double coupling_marginal_violation(const Matrix& p, const Vector& row_marginal,
                                   const Vector& col_marginal);

// Factored 4-plan over X1 x Z1 x Z2 x X2:
//   alpha(i,j,k,l) = u1(i) k1(i,j) k2(j,k) k3(k,l) u2(l).
// Kernels and scalings are stored in log domain so that small entropic
// regularization (eps ~ 1e-3 on O(1) costs) stays representable; the implied
// kernel entries are strictly positive as extended reals.  Solvers fold the
// uniform reference measure into the kernels.
struct ChainPlan {
    Matrix log_k1;  // n1 x m
    Matrix log_k2;  // m x m
    Matrix log_k3;  // m x n2
    Vector log_u1;  // n1
    Vector log_u2;  // n2
    double epsilon = 0.0;

    Eigen::Index n1() const { return log_k1.rows(); }
    Eigen::Index m() const { return log_k2.rows(); }
    Eigen::Index n2() const { return log_k3.cols(); }

    Matrix k1() const { return log_k1.array().exp(); }
    Matrix k2() const { return log_k2.array().exp(); }
    Matrix k3() const { return log_k3.array().exp(); }
    Vector u1() const { return log_u1.array().exp(); }
    Vector u2() const { return log_u2.array().exp(); }
};

ChainPlan validate_chain_plan(ChainPlan plan);

// Dense materialization of a chain plan, for bounded test oracles only.
struct DenseTensor4 {
    std::vector<double> v;
    Eigen::Index n1 = 0, m1 = 0, m2 = 0, n2 = 0;
    double& at(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) {
        return v[((i * m1 + j) * m2 + k) * n2 + l];
    }
    double at(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
        return v[((i * m1 + j) * m2 + k) * n2 + l];
    }
    double total_mass() const;
    Vector marginal(int axis) const;  // axis in {0,1,2,3}
};

// Legal only for n1 * m^2 * n2 <= 10^6.
DenseTensor4 dense_tensor(const ChainPlan& plan);

// Full output of the EW_lambda solver.
struct EmbedResult {
    Coupling pi;       // m x m
    Coupling gamma1;   // n1 x m
    Coupling gamma2;   // n2 x m
    SimplexWeights mu1;
    SimplexWeights mu2;
    std::vector<double> objective_trace;       // unregularized F after each half-step
    std::vector<double> regularized_trace;     // bi-convex value after each half-step
    std::vector<double> objective_trace_alpha1;
    std::vector<double> objective_trace_alpha2;
    std::vector<double> sinkhorn_violations;
    std::vector<int> sinkhorn_iterations;
    double final_objective = 0.0;
    int selected_plan = 1;  // 1 or 2
    bool converged = false;
    int iterations = 0;
};

}  // namespace ewalign
