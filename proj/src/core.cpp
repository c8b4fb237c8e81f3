#include "ewalign/core.hpp"

#include <cmath>
#include <sstream>

namespace ewalign {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::AsymmetricMatrix: return "AsymmetricMatrix";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
        case ErrorCode::WeightsNotSimplex: return "WeightsNotSimplex";
        case ErrorCode::TriangleViolation: return "TriangleViolation";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::SizeBoundExceeded: return "SizeBoundExceeded";
        case ErrorCode::InfeasibleMarginals: return "InfeasibleMarginals";
        case ErrorCode::NumericalOverflow: return "NumericalOverflow";
        case ErrorCode::DegenerateExtent: return "DegenerateExtent";
        case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorCode::ConstantFeatureRow: return "ConstantFeatureRow";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::MarginalMismatch: return "MarginalMismatch";
        case ErrorCode::NoIsometricEmbedding: return "NoIsometricEmbedding";
        case ErrorCode::EnumerationBoundExceeded: return "EnumerationBoundExceeded";
        case ErrorCode::UnsupportedGeometry: return "UnsupportedGeometry";
        case ErrorCode::AllMassZero: return "AllMassZero";
        case ErrorCode::CountMismatch: return "CountMismatch";
        case ErrorCode::IncompatibleCorpus: return "IncompatibleCorpus";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

const char* geometry_name(Geometry g) {
    switch (g) {
        case Geometry::EuclideanGrid: return "euclidean_grid";
        case Geometry::SphereGrid: return "sphere_grid";
        case Geometry::TorusGrid: return "torus_grid";
        case Geometry::GaussianW2: return "gaussian_w2";
        case Geometry::Custom: return "custom";
    }
    return "custom";
}

SimplexWeights validate_simplex_weights(const Vector& w, double tol) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w(i) >= 0.0))
            throw Error(ErrorCode::WeightsNotSimplex,
                        "weight " + std::to_string(i) + " is negative or NaN");
    }
    const double sum = w.sum();
    if (std::abs(sum - 1.0) > tol)
        throw Error(ErrorCode::WeightsNotSimplex,
                    "weights sum to " + std::to_string(sum) + ", expected 1");
    return SimplexWeights{w};
}

SimplexWeights uniform_weights(Eigen::Index n) {
    return SimplexWeights{Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

double max_triangle_violation(const Matrix& d) {
    const Eigen::Index n = d.rows();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                worst = std::max(worst, d(i, k) - d(i, j) - d(j, k));
    return worst;
}

DistanceMatrix validate_distance_matrix(const Matrix& d, bool check_triangle,
                                        double triangle_tol) {
    if (d.rows() != d.cols())
        throw Error(ErrorCode::SizeMismatch, "distance matrix is not square");
    const Eigen::Index n = d.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(d(i, i)) > 0.0)
            throw Error(ErrorCode::NonzeroDiagonal,
                        "diagonal entry " + std::to_string(i) + " is nonzero");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(d(i, j) >= 0.0))
                throw Error(ErrorCode::NegativeEntry, "entry (" + std::to_string(i) + "," +
                                                          std::to_string(j) + ") is negative or NaN");
            if (std::abs(d(i, j) - d(j, i)) > 1e-12)
                throw Error(ErrorCode::AsymmetricMatrix, "entries (" + std::to_string(i) + "," +
                                                             std::to_string(j) + ") differ");
        }
    }
    if (check_triangle) {
        const double worst = max_triangle_violation(d);
        if (worst > triangle_tol)
            throw Error(ErrorCode::TriangleViolation,
                        "triangle inequality violated by " + std::to_string(worst));
    }
    return DistanceMatrix{d};
}

MmSpace validate_mm_space(const Matrix& dist, const Vector& weights,
                          const std::vector<int>& labels, bool check_triangle) {
    DistanceMatrix d = validate_distance_matrix(dist, check_triangle);
    if (weights.size() != d.size())
        throw Error(ErrorCode::SizeMismatch, "weights length does not match distance matrix");
    SimplexWeights w = validate_simplex_weights(weights);
    if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != d.size())
        throw Error(ErrorCode::SizeMismatch, "label count does not match distance matrix");
    return MmSpace{std::move(d), std::move(w), labels};
}

ReferenceSpace validate_reference_space(ReferenceSpace space, double tol) {
    space.dist = validate_distance_matrix(space.dist.d);
    if (space.geometry != Geometry::Custom && space.points.rows() != space.dist.size())
        throw Error(ErrorCode::SizeMismatch, "point count does not match distance matrix");
    (void)tol;  // geometry consistency is checked by the constructors in spaces.cpp
    return space;
}

double coupling_marginal_violation(const Matrix& p, const Vector& row_marginal,
                                   const Vector& col_marginal) {
    const double row = (p.rowwise().sum() - row_marginal).cwiseAbs().maxCoeff();
    const double col = (p.colwise().sum().transpose() - col_marginal).cwiseAbs().maxCoeff();
    return std::max(row, col);
}

Coupling validate_coupling(const Matrix& p, const Vector& row_marginal,
                           const Vector& col_marginal, double marginal_tol) {
    if (p.rows() != row_marginal.size() || p.cols() != col_marginal.size())
        throw Error(ErrorCode::SizeMismatch, "coupling shape does not match marginals");
    if ((p.array() < 0.0).any())
        throw Error(ErrorCode::NegativeEntry, "coupling has negative entries");
    const double viol = coupling_marginal_violation(p, row_marginal, col_marginal);
    if (viol > marginal_tol)
        throw Error(ErrorCode::MarginalMismatch,
                    "marginal violation " + std::to_string(viol) + " exceeds tolerance");
    if (std::abs(p.sum() - 1.0) > 1e-9)
        throw Error(ErrorCode::MarginalMismatch, "total mass is not 1");
    return Coupling{p, SimplexWeights{row_marginal}, SimplexWeights{col_marginal}};
}

namespace {

void require_finite_logs(const Matrix& lk, const char* name) {
    if (!((lk.array() < std::numeric_limits<double>::infinity()).all()) || lk.hasNaN())
        throw Error(ErrorCode::NumericalOverflow, std::string(name) + " has NaN or +inf entries");
}

}  // namespace

ChainPlan validate_chain_plan(ChainPlan plan) {
    if (plan.log_k1.cols() != plan.log_k2.rows() || plan.log_k2.cols() != plan.log_k3.rows())
        throw Error(ErrorCode::SizeMismatch, "chain kernel shapes are inconsistent");
    if (plan.log_u1.size() != plan.n1() || plan.log_u2.size() != plan.n2())
        throw Error(ErrorCode::SizeMismatch, "chain scaling lengths are inconsistent");
    if (!(plan.epsilon > 0.0))
        throw Error(ErrorCode::InvalidConfig, "chain plan epsilon must be positive");
    require_finite_logs(plan.log_k1, "log_k1");
    require_finite_logs(plan.log_k2, "log_k2");
    require_finite_logs(plan.log_k3, "log_k3");
    if (plan.log_u1.hasNaN() || plan.log_u2.hasNaN() ||
        (plan.log_u1.array() == std::numeric_limits<double>::infinity()).any() ||
        (plan.log_u2.array() == std::numeric_limits<double>::infinity()).any())
        throw Error(ErrorCode::NumericalOverflow, "chain scalings have NaN or +inf entries");
    return plan;
}

double DenseTensor4::total_mass() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

Vector DenseTensor4::marginal(int axis) const {
    const Eigen::Index dims[4] = {n1, m1, m2, n2};
    Vector out = Vector::Zero(dims[axis]);
    for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < m1; ++j)
            for (Eigen::Index k = 0; k < m2; ++k)
                for (Eigen::Index l = 0; l < n2; ++l) {
                    const Eigen::Index idx[4] = {i, j, k, l};
                    out(idx[axis]) += at(i, j, k, l);
                }
    return out;
}

DenseTensor4 dense_tensor(const ChainPlan& plan) {
    const Eigen::Index n1 = plan.n1(), m = plan.m(), n2 = plan.n2();
    const double cells = static_cast<double>(n1) * m * m * n2;
    if (cells > 1e6)
        throw Error(ErrorCode::SizeBoundExceeded,
                    "dense tensor would have " + std::to_string(cells) + " cells (limit 1e6)");
    DenseTensor4 t;
    t.n1 = n1;
    t.m1 = m;
    t.m2 = m;
    t.n2 = n2;
    t.v.assign(static_cast<size_t>(cells), 0.0);
    for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index k = 0; k < m; ++k)
                for (Eigen::Index l = 0; l < n2; ++l)
                    t.at(i, j, k, l) = std::exp(plan.log_u1(i) + plan.log_k1(i, j) +
                                                plan.log_k2(j, k) + plan.log_k3(k, l) +
                                                plan.log_u2(l));
    return t;
}

}  // namespace ewalign
