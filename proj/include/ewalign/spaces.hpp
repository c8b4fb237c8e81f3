#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ewalign/core.hpp"

namespace ewalign {

// Undirected weighted graph.
struct Graph {
    struct Edge {
        int i;
        int j;
        double w;
    };
    int n = 0;
    std::vector<Edge> edges;
};

struct Gaussian2 {
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
};

enum class FeatureMetric { Euclidean, Correlation };

// Equispaced grid with pairwise Euclidean distances.  `extent` gives [lo, hi]
// per axis, `resolution` the number of nodes per axis (>= 2).
ReferenceSpace euclidean_grid(const std::vector<std::array<double, 2>>& extent,
                              const std::vector<int>& resolution);

// Grid on the unit 2-sphere in the canonical (theta, phi) parametrization with
// great-circle distances.  Polar angles are cell-centered so the grid has no
// duplicate points at the poles.
ReferenceSpace sphere_grid(int res_theta, int res_phi);

// Flat torus S(1) x S(1): d((a,b),(a',b'))^2 = d_circ(a,a')^2 + d_circ(b,b')^2.
ReferenceSpace torus_grid(int res_a, int res_b);

// Equiangular points on the unit circle with arc-length distance.
ReferenceSpace circle_space(int bins);

// Great-circle distance between unit vectors (arccos of clamped dot product).
double great_circle(const Eigen::Vector3d& u, const Eigen::Vector3d& v);

// Circular distance between angles, period 2*pi by default.
double circular_distance(double a, double b, double period = 2.0 * EIGEN_PI);

// All-pairs shortest paths; throws DisconnectedGraph naming the components.
DistanceMatrix dijkstra_all_pairs(const Graph& g, int threads = 1);

// Symmetrized (union rule) k-nearest-neighbor graph.  Correlation distance is
// 1 - Pearson correlation of the feature rows.
Graph knn_graph(const Matrix& features, int k, FeatureMetric metric);

// One edge per unique mesh edge with Euclidean length; degenerate face entries
// (repeated indices) are skipped.
Graph mesh_to_graph(const Matrix& vertices, const std::vector<std::array<int, 3>>& faces);

// Closed-form W2 between 2d Gaussians.
double bures_wasserstein(const Gaussian2& a, const Gaussian2& b);

// Product grid over means and covariance choices, metrized by
// bures_wasserstein.  Covariances are variance_scale * [s1 s12; s12 s2].
ReferenceSpace gaussian_grid(const std::vector<std::array<double, 2>>& mean_extent,
                             const std::vector<int>& mean_resolution, double variance_scale,
                             const std::vector<double>& sigma_sq_choices,
                             const std::vector<double>& offdiag_choices);

Gaussian2 gaussian_from_point_row(const Eigen::Ref<const Eigen::RowVectorXd>& row);

// Weights proportional to exp(kappa * cos(theta_i - location)) on equiangular
// bins; kappa = 0 gives the uniform distribution.
SimplexWeights von_mises_weights(int bins, double kappa, double location);

}  // namespace ewalign
