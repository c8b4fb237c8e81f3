#include "ewalign/spaces.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <thread>

namespace ewalign {

namespace {

// Cartesian product of per-axis linspaces, row-major with the last axis fastest.
Matrix grid_points(const std::vector<std::vector<double>>& axes) {
    Eigen::Index total = 1;
    for (const auto& a : axes) total *= static_cast<Eigen::Index>(a.size());
    Matrix pts(total, static_cast<Eigen::Index>(axes.size()));
    for (Eigen::Index r = 0; r < total; ++r) {
        Eigen::Index rem = r;
        for (Eigen::Index ax = static_cast<Eigen::Index>(axes.size()) - 1; ax >= 0; --ax) {
            const auto& vals = axes[static_cast<size_t>(ax)];
            pts(r, ax) = vals[static_cast<size_t>(rem % static_cast<Eigen::Index>(vals.size()))];
            rem /= static_cast<Eigen::Index>(vals.size());
        }
    }
    return pts;
}

Matrix pairwise_euclidean(const Matrix& pts) {
    const Eigen::Index n = pts.rows();
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dij = (pts.row(i) - pts.row(j)).norm();
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    return d;
}

}  // namespace

double circular_distance(double a, double b, double period) {
    double diff = std::fmod(std::abs(a - b), period);
    return std::min(diff, period - diff);
}

double great_circle(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    const double dot = std::clamp(u.normalized().dot(v.normalized()), -1.0, 1.0);
    return std::acos(dot);
}

ReferenceSpace euclidean_grid(const std::vector<std::array<double, 2>>& extent,
                              const std::vector<int>& resolution) {
    if (extent.size() != resolution.size() || extent.empty())
        throw Error(ErrorCode::SizeMismatch, "extent and resolution must match and be nonempty");
    std::vector<std::vector<double>> axes;
    for (size_t ax = 0; ax < extent.size(); ++ax) {
        const auto [lo, hi] = extent[ax];
        const int res = resolution[ax];
        if (!(hi > lo) || res < 2)
            throw Error(ErrorCode::DegenerateExtent,
                        "axis " + std::to_string(ax) + " needs hi > lo and resolution >= 2");
        std::vector<double> vals(static_cast<size_t>(res));
        for (int i = 0; i < res; ++i) vals[static_cast<size_t>(i)] = lo + (hi - lo) * i / (res - 1);
        axes.push_back(std::move(vals));
    }
    ReferenceSpace space;
    space.points = grid_points(axes);
    space.dist = DistanceMatrix{pairwise_euclidean(space.points)};
    space.geometry = Geometry::EuclideanGrid;
    space.periodic.assign(extent.size(), false);
    return space;
}

ReferenceSpace sphere_grid(int res_theta, int res_phi) {
    if (res_theta < 2 || res_phi < 2)
        throw Error(ErrorCode::DegenerateExtent, "sphere grid needs resolution >= 2 per axis");
    std::vector<std::vector<double>> axes(2);
    for (int i = 0; i < res_theta; ++i)
        axes[0].push_back(EIGEN_PI * (i + 0.5) / res_theta);  // cell-centered, avoids poles
    for (int j = 0; j < res_phi; ++j) axes[1].push_back(2.0 * EIGEN_PI * j / res_phi);

    ReferenceSpace space;
    space.points = grid_points(axes);
    const Eigen::Index n = space.points.rows();
    Matrix xyz(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double th = space.points(i, 0), ph = space.points(i, 1);
        xyz.row(i) << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
    }
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dij = great_circle(xyz.row(i), xyz.row(j));
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    space.dist = DistanceMatrix{d};
    space.geometry = Geometry::SphereGrid;
    space.periodic = {false, true};
    return space;
}

ReferenceSpace torus_grid(int res_a, int res_b) {
    if (res_a < 2 || res_b < 2)
        throw Error(ErrorCode::DegenerateExtent, "torus grid needs resolution >= 2 per axis");
    std::vector<std::vector<double>> axes(2);
    for (int i = 0; i < res_a; ++i) axes[0].push_back(2.0 * EIGEN_PI * i / res_a);
    for (int j = 0; j < res_b; ++j) axes[1].push_back(2.0 * EIGEN_PI * j / res_b);

    ReferenceSpace space;
    space.points = grid_points(axes);
    const Eigen::Index n = space.points.rows();
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double da = circular_distance(space.points(i, 0), space.points(j, 0));
            const double db = circular_distance(space.points(i, 1), space.points(j, 1));
            const double dij = std::sqrt(da * da + db * db);
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    space.dist = DistanceMatrix{d};
    space.geometry = Geometry::TorusGrid;
    space.periodic = {true, true};
    return space;
}

ReferenceSpace circle_space(int bins) {
    if (bins < 2) throw Error(ErrorCode::DegenerateExtent, "circle needs at least 2 bins");
    ReferenceSpace space;
    space.points.resize(bins, 1);
    for (int i = 0; i < bins; ++i) space.points(i, 0) = 2.0 * EIGEN_PI * i / bins;
    Matrix d(bins, bins);
    for (int i = 0; i < bins; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < bins; ++j) {
            const double dij = circular_distance(space.points(i, 0), space.points(j, 0));
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    space.dist = DistanceMatrix{d};
    space.geometry = Geometry::TorusGrid;  // one periodic chart axis
    space.periodic = {true};
    return space;
}

DistanceMatrix dijkstra_all_pairs(const Graph& g, int threads) {
    const int n = g.n;
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
    for (const auto& e : g.edges) {
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
            throw Error(ErrorCode::IndexOutOfRange, "edge endpoint out of range");
        if (e.w < 0.0) throw Error(ErrorCode::NegativeEntry, "negative edge weight");
        if (e.i == e.j) continue;
        adj[static_cast<size_t>(e.i)].emplace_back(e.j, e.w);
        adj[static_cast<size_t>(e.j)].emplace_back(e.i, e.w);
    }

    // Connectivity check first so the error can name the components.
    {
        std::vector<int> comp(static_cast<size_t>(n), -1);
        int ncomp = 0;
        for (int s = 0; s < n; ++s) {
            if (comp[static_cast<size_t>(s)] >= 0) continue;
            std::vector<int> stack{s};
            comp[static_cast<size_t>(s)] = ncomp;
            while (!stack.empty()) {
                const int u = stack.back();
                stack.pop_back();
                for (const auto& [v, w] : adj[static_cast<size_t>(u)]) {
                    (void)w;
                    if (comp[static_cast<size_t>(v)] < 0) {
                        comp[static_cast<size_t>(v)] = ncomp;
                        stack.push_back(v);
                    }
                }
            }
            ++ncomp;
        }
        if (ncomp > 1) {
            std::vector<int> sizes(static_cast<size_t>(ncomp), 0);
            for (int c : comp) ++sizes[static_cast<size_t>(c)];
            std::string msg = "graph has " + std::to_string(ncomp) + " components of sizes";
            for (int s : sizes) msg += " " + std::to_string(s);
            throw Error(ErrorCode::DisconnectedGraph, msg);
        }
    }

    Matrix d(n, n);
    auto run_source = [&](int s) {
        std::vector<double> dist(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
        dist[static_cast<size_t>(s)] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            const auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[static_cast<size_t>(u)]) continue;
            for (const auto& [v, w] : adj[static_cast<size_t>(u)]) {
                const double nd = du + w;
                if (nd < dist[static_cast<size_t>(v)]) {
                    dist[static_cast<size_t>(v)] = nd;
                    pq.emplace(nd, v);
                }
            }
        }
        for (int t = 0; t < n; ++t) d(s, t) = dist[static_cast<size_t>(t)];
    };

    if (threads <= 1) {
        for (int s = 0; s < n; ++s) run_source(s);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int s = next.fetch_add(1); s < n; s = next.fetch_add(1)) run_source(s);
            });
        for (auto& th : pool) th.join();
    }

    // Symmetrize: per-source runs agree up to rounding on undirected graphs.
    Matrix sym = 0.5 * (d + d.transpose());
    sym.diagonal().setZero();
    return DistanceMatrix{sym};
}

Graph knn_graph(const Matrix& features, int k, FeatureMetric metric) {
    const Eigen::Index n = features.rows();
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
    if (k >= n) throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) +
                                                      " but only " + std::to_string(n) + " rows");

    Matrix d(n, n);
    if (metric == FeatureMetric::Euclidean) {
        d = pairwise_euclidean(features);
    } else {
        const Eigen::Index dim = features.cols();
        // Center each row for Pearson correlation between rows.
        Matrix centered = features;
        centered.colwise() -= features.rowwise().mean();
        Vector norms(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            norms(i) = centered.row(i).norm();
            if (norms(i) <= 1e-14 * std::sqrt(static_cast<double>(dim)))
                throw Error(ErrorCode::ConstantFeatureRow,
                            "row " + std::to_string(i) + " has zero variance");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            d(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double corr = centered.row(i).dot(centered.row(j)) / (norms(i) * norms(j));
                const double dij = std::max(0.0, 1.0 - corr);
                d(i, j) = dij;
                d(j, i) = dij;
            }
        }
    }

    std::set<std::pair<int, int>> picked;
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) order[static_cast<size_t>(j)] = j;
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
            return a < b;
        });
        int taken = 0;
        for (Eigen::Index j : order) {
            if (j == i) continue;
            picked.emplace(std::min<int>(i, j), std::max<int>(i, j));
            if (++taken == k) break;
        }
    }

    Graph g;
    g.n = static_cast<int>(n);
    for (const auto& [i, j] : picked) g.edges.push_back({i, j, d(i, j)});
    return g;
}

Graph mesh_to_graph(const Matrix& vertices, const std::vector<std::array<int, 3>>& faces) {
    const int n = static_cast<int>(vertices.rows());
    std::set<std::pair<int, int>> uniq;
    for (const auto& f : faces) {
        for (int e = 0; e < 3; ++e) {
            int a = f[static_cast<size_t>(e)], b = f[static_cast<size_t>((e + 1) % 3)];
            if (a < 0 || a >= n || b < 0 || b >= n)
                throw Error(ErrorCode::IndexOutOfRange, "face index out of range");
            if (a == b) continue;  // degenerate face edge
            uniq.emplace(std::min(a, b), std::max(a, b));
        }
    }
    Graph g;
    g.n = n;
    for (const auto& [a, b] : uniq)
        g.edges.push_back({a, b, (vertices.row(a) - vertices.row(b)).norm()});
    return g;
}

namespace {

void require_spd(const Eigen::Matrix2d& cov) {
    if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12)
        throw Error(ErrorCode::AsymmetricMatrix, "covariance is not symmetric");
    if (!(cov(0, 0) > 0.0) || !(cov.determinant() > 0.0))
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
}

}  // namespace

double bures_wasserstein(const Gaussian2& a, const Gaussian2& b) {
    require_spd(a.cov);
    require_spd(b.cov);
    const double mean_term = (a.mean - b.mean).squaredNorm();
    // tr((A^1/2 B A^1/2)^1/2) = sqrt(tr(AB) + 2 sqrt(det A det B)) for 2x2 spd.
    const double tr_ab = (a.cov * b.cov).trace();
    const double det_ab = a.cov.determinant() * b.cov.determinant();
    const double cross = std::sqrt(std::max(0.0, tr_ab + 2.0 * std::sqrt(std::max(0.0, det_ab))));
    const double sq =
        mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
    return std::sqrt(std::max(0.0, sq));
}

Gaussian2 gaussian_from_point_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    Gaussian2 g;
    g.mean << row(0), row(1);
    g.cov << row(2), row(3), row(3), row(4);
    return g;
}

ReferenceSpace gaussian_grid(const std::vector<std::array<double, 2>>& mean_extent,
                             const std::vector<int>& mean_resolution, double variance_scale,
                             const std::vector<double>& sigma_sq_choices,
                             const std::vector<double>& offdiag_choices) {
    if (!(variance_scale > 0.0))
        throw Error(ErrorCode::InvalidConfig, "variance scale must be positive");
    ReferenceSpace means = euclidean_grid(mean_extent, mean_resolution);
    if (means.points.cols() != 2)
        throw Error(ErrorCode::InvalidConfig, "gaussian grid needs 2d means");

    std::vector<Eigen::Matrix2d> covs;
    for (double s1 : sigma_sq_choices)
        for (double s2 : sigma_sq_choices)
            for (double s12 : offdiag_choices) {
                Eigen::Matrix2d c;
                c << s1, s12, s12, s2;
                c *= variance_scale;
                require_spd(c);
                covs.push_back(c);
            }

    const Eigen::Index n = means.points.rows() * static_cast<Eigen::Index>(covs.size());
    ReferenceSpace space;
    space.points.resize(n, 5);
    Eigen::Index r = 0;
    for (Eigen::Index mi = 0; mi < means.points.rows(); ++mi)
        for (const auto& c : covs) {
            space.points.row(r) << means.points(mi, 0), means.points(mi, 1), c(0, 0), c(0, 1),
                c(1, 1);
            ++r;
        }

    Matrix d(n, n);
    std::vector<Gaussian2> gs(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) gs[static_cast<size_t>(i)] = gaussian_from_point_row(space.points.row(i));
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dij = bures_wasserstein(gs[static_cast<size_t>(i)], gs[static_cast<size_t>(j)]);
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    space.dist = DistanceMatrix{d};
    space.geometry = Geometry::GaussianW2;
    space.periodic.assign(5, false);
    return space;
}

SimplexWeights von_mises_weights(int bins, double kappa, double location) {
    if (bins < 2) throw Error(ErrorCode::DegenerateExtent, "von Mises weights need >= 2 bins");
    if (kappa < 0.0) throw Error(ErrorCode::InvalidConfig, "kappa must be nonnegative");
    Vector w(bins);
    for (int i = 0; i < bins; ++i) {
        const double theta = 2.0 * EIGEN_PI * i / bins;
        w(i) = std::exp(kappa * std::cos(theta - location));
    }
    w /= w.sum();
    return SimplexWeights{w};
}

}  // namespace ewalign
