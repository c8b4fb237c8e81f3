#pragma once

#include "ewalign/core.hpp"
#include "ewalign/ew.hpp"
#include "ewalign/gw.hpp"

namespace ewalign {

// Barycentric projections of the source points into the reference chart.
// Rows with mass below the exclusion threshold are flagged invalid.
struct ProjectedPoints {
    Matrix points;             // n x chart dimension
    Vector mass;               // row sums of the coupling
    std::vector<bool> valid;   // mass >= threshold
};

constexpr double kProjectionMassThreshold = 1e-12;

// x~_j = sum_k gamma(j,k) z_k / sum_k gamma(j,k).  Euclidean charts average
// linearly; periodic chart axes (torus, circle, sphere azimuth) use the
// circular mean.  Gaussian reference spaces are not projectable.
ProjectedPoints barycentric_projection(const Matrix& gamma, const ReferenceSpace& z);

// Fraction of samples closer than the true match (strict inequality), in
// [0, 1]; 0 is perfect identification.  Index j of p1 corresponds to index j
// of p2.  Rows flagged invalid on either side are excluded.
double foscttm(const ProjectedPoints& p1, const ProjectedPoints& p2);

// Symmetrized variant: average of both directions.
double foscttm_symmetric(const ProjectedPoints& p1, const ProjectedPoints& p2);

// Majority vote among the k nearest train points; ties broken by smaller
// summed neighbor distance, then lower label id.
double knn_transfer_accuracy(const ProjectedPoints& train, const std::vector<int>& train_labels,
                             const ProjectedPoints& test, const std::vector<int>& test_labels,
                             int k);

enum class PairwiseKind { W2SharedSupport, Gw, EwLambda };

struct PairwiseOptions {
    PairwiseKind kind = PairwiseKind::Gw;
    EwConfig ew;        // used for EwLambda
    GwOptions gw;       // used for Gw
    int threads = 1;
};

// Symmetric matrix of pairwise distances over the corpus; each unordered pair
// is computed once.  W2 requires all corpus spaces to share one support.
Matrix pairwise_distance_matrix(const std::vector<MmSpace>& corpus, const ReferenceSpace& z,
                                const PairwiseOptions& opts);

}  // namespace ewalign
