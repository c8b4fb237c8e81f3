#include <doctest.h>

#include <cmath>
#include <random>

#include "ewalign/spaces.hpp"
#include "support/oracles.hpp"

using namespace ewalign;

TEST_CASE("euclidean_grid corners of the unit square") {
    const ReferenceSpace z = euclidean_grid({{0.0, 1.0}, {0.0, 1.0}}, {2, 2});
    CHECK(z.size() == 4);
    CHECK(z.dist.d.maxCoeff() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("euclidean_grid matches the 50x50 setup") {
    const ReferenceSpace z = euclidean_grid({{0.0, 1.3}, {0.0, 1.3}}, {50, 50});
    CHECK(z.size() == 2500);
    CHECK(z.points.minCoeff() == doctest::Approx(0.0));
    CHECK(z.points.maxCoeff() == doctest::Approx(1.3));
}

TEST_CASE("euclidean_grid rejects a degenerate axis") {
    try {
        euclidean_grid({{0.0, 1.0}, {0.0, 1.0}}, {1, 2});
        FAIL("expected DegenerateExtent");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateExtent);
    }
}

TEST_CASE("sphere geodesics: self, quarter circle, antipodal") {
    CHECK(great_circle({0, 0, 1}, {0, 0, 1}) == doctest::Approx(0.0));
    CHECK(great_circle({0, 0, 1}, {1, 0, 0}) == doctest::Approx(EIGEN_PI / 2));  // pole -> equator
    const ReferenceSpace z = sphere_grid(2, 2);
    CHECK(z.size() == 4);
    // theta in {pi/4, 3pi/4}, phi in {0, pi}: (pi/4, 0) and (3pi/4, pi) are antipodal
    bool found_pi = false;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        for (Eigen::Index j = 0; j < z.size(); ++j)
            if (std::abs(z.dist.d(i, j) - EIGEN_PI) < 1e-9) found_pi = true;
    CHECK(found_pi);
    CHECK(z.dist.d.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("torus distances use the flat product metric") {
    const ReferenceSpace z = torus_grid(4, 4);
    CHECK(z.size() == 16);
    // same point
    CHECK(z.dist.d(0, 0) == 0.0);
    // half-turn on one factor only: index (2,0) vs (0,0)
    CHECK(z.dist.d(0, 2 * 4 + 0) == doctest::Approx(EIGEN_PI));
    // quarter-turn on both factors: sqrt(2) * pi/2 = sqrt(pi^2/2)
    CHECK(z.dist.d(0, 1 * 4 + 1) == doctest::Approx(std::sqrt(EIGEN_PI * EIGEN_PI / 2.0)));
}

TEST_CASE("circle_space distances") {
    const ReferenceSpace z = circle_space(4);
    CHECK(z.dist.d(0, 1) == doctest::Approx(EIGEN_PI / 2));  // adjacent
    CHECK(z.dist.d(0, 2) == doctest::Approx(EIGEN_PI));      // opposite
    const ReferenceSpace paper_scale = circle_space(360);
    CHECK(paper_scale.size() == 360);
}

TEST_CASE("grid distance matrices satisfy the metric axioms") {
    for (const ReferenceSpace& z :
         {sphere_grid(3, 4), torus_grid(3, 3), circle_space(8)}) {
        CHECK_NOTHROW(validate_distance_matrix(z.dist.d, true));
    }
}

TEST_CASE("dijkstra on a path graph composes edge lengths") {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    const DistanceMatrix d = dijkstra_all_pairs(g);
    CHECK(d.d(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("dijkstra takes the two-hop shortcut on a triangle") {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}};
    const DistanceMatrix d = dijkstra_all_pairs(g);
    CHECK(d.d(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("dijkstra on the 4-cycle matches brute-force path enumeration") {
    Graph g;
    g.n = 4;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}};
    const DistanceMatrix d = dijkstra_all_pairs(g);
    std::vector<std::array<double, 3>> edges;
    for (const auto& e : g.edges)
        edges.push_back({static_cast<double>(e.i), static_cast<double>(e.j), e.w});
    for (int s = 0; s < 4; ++s)
        for (int t = 0; t < 4; ++t) {
            const double expect = s == t ? 0.0 : oracles::brute_force_shortest_path(4, edges, s, t);
            CHECK(d.d(s, t) == doctest::Approx(expect));
        }
    CHECK(d.d(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("dijkstra reports disconnected components") {
    Graph g;
    g.n = 4;
    g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
    try {
        dijkstra_all_pairs(g);
        FAIL("expected DisconnectedGraph");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DisconnectedGraph);
        CHECK(std::string(e.what()).find("2 components") != std::string::npos);
    }
}

TEST_CASE("dijkstra reproduces a realized metric on complete graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4 + trial % 3;
        const Matrix metric = oracles::random_point_metric(rng, n);
        Graph g;
        g.n = n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j, metric(i, j)});
        const DistanceMatrix d = dijkstra_all_pairs(g);
        CHECK((d.d - metric).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("knn_graph picks nearest neighbors on the line") {
    Matrix feats(3, 1);
    feats << 0.0, 1.0, 10.0;
    const Graph g = knn_graph(feats, 1, FeatureMetric::Euclidean);
    REQUIRE(g.edges.size() == 2);  // union symmetrization: (0,1) and (1,2)
    CHECK(g.edges[0].i == 0);
    CHECK(g.edges[0].j == 1);
    CHECK(g.edges[1].i == 1);
    CHECK(g.edges[1].j == 2);
}

TEST_CASE("knn_graph correlation metric") {
    Matrix feats(3, 4);
    feats << 1.0, 2.0, 3.0, 4.0,  //
        2.0, 4.0, 6.0, 8.0,       // proportional to row 0: distance 0
        4.0, 3.0, 2.0, 1.0;       // anti-correlated
    const Graph g = knn_graph(feats, 1, FeatureMetric::Correlation);
    bool found01 = false;
    for (const auto& e : g.edges)
        if (e.i == 0 && e.j == 1) {
            found01 = true;
            CHECK(e.w == doctest::Approx(0.0));
        }
    CHECK(found01);

    Matrix constant_row(2, 3);
    constant_row << 1.0, 1.0, 1.0, 0.0, 1.0, 2.0;
    try {
        knn_graph(constant_row, 1, FeatureMetric::Correlation);
        FAIL("expected ConstantFeatureRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConstantFeatureRow);
    }
}

TEST_CASE("knn_graph rejects k >= n") {
    Matrix feats(3, 1);
    feats << 0.0, 1.0, 2.0;
    try {
        knn_graph(feats, 3, FeatureMetric::Euclidean);
        FAIL("expected KTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::KTooLarge);
    }
}

TEST_CASE("mesh_to_graph deduplicates edges and filters degenerate faces") {
    Matrix verts(4, 3);
    verts << 0, 0, 0, 1, 0, 0, 0.5, std::sqrt(3.0) / 2.0, 0, 1.5, std::sqrt(3.0) / 2.0, 0;

    const Graph single = mesh_to_graph(verts, {{0, 1, 2}});
    CHECK(single.edges.size() == 3);
    for (const auto& e : single.edges) CHECK(e.w == doctest::Approx(1.0));

    const Graph shared = mesh_to_graph(verts, {{0, 1, 2}, {1, 3, 2}});
    CHECK(shared.edges.size() == 5);  // five unique edges over two triangles

    const Graph degen = mesh_to_graph(verts, {{0, 0, 1}});
    CHECK(degen.edges.size() == 1);  // self-loops dropped

    try {
        mesh_to_graph(verts, {{0, 1, 9}});
        FAIL("expected IndexOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
}

TEST_CASE("bures_wasserstein closed forms") {
    Gaussian2 a{{0, 0}, Eigen::Matrix2d::Identity()};
    CHECK(bures_wasserstein(a, a) == doctest::Approx(0.0));

    Gaussian2 b{{0, 0}, 2.5 * Eigen::Matrix2d::Identity()};
    Gaussian2 c{{0, 0}, 0.3 * Eigen::Matrix2d::Identity()};
    const double expect = std::sqrt(2.0) * std::abs(std::sqrt(2.5) - std::sqrt(0.3));
    CHECK(bures_wasserstein(b, c) == doctest::Approx(expect).epsilon(1e-12));

    Gaussian2 shifted{{3, 4}, Eigen::Matrix2d::Identity()};
    CHECK(bures_wasserstein(a, shifted) == doctest::Approx(5.0));
}

TEST_CASE("bures_wasserstein satisfies the metric axioms on random spd triples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_gaussian = [&]() {
        Gaussian2 g;
        g.mean << unif(rng), unif(rng);
        Eigen::Matrix2d base;
        base << 1.0 + std::abs(unif(rng)), unif(rng) * 0.5, 0.0, 1.0 + std::abs(unif(rng));
        base(1, 0) = base(0, 1);
        g.cov = base * base.transpose() + 0.05 * Eigen::Matrix2d::Identity();
        return g;
    };
    for (int trial = 0; trial < 50; ++trial) {
        const Gaussian2 a = random_gaussian(), b = random_gaussian(), c = random_gaussian();
        const double ab = bures_wasserstein(a, b);
        const double ba = bures_wasserstein(b, a);
        const double ac = bures_wasserstein(a, c);
        const double cb = bures_wasserstein(c, b);
        CHECK(std::abs(ab - ba) < 1e-9);
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("gaussian_grid matches the covariance template setup") {
    const ReferenceSpace z =
        gaussian_grid({{0.0, 1.0}, {0.0, 1.0}}, {15, 15}, 0.01, {0.8, 1.0}, {-0.2, 0.0, 0.2});
    CHECK(z.size() == 2700);  // 15*15 means, 2*2*3 covariance combos
    CHECK(z.geometry == Geometry::GaussianW2);
}

TEST_CASE("gaussian_grid single point and spd failure") {
    const ReferenceSpace z = gaussian_grid({{0.0, 0.0 + 1e-9}, {0.0, 1e-9}}, {2, 2}, 1.0, {1.0}, {0.0});
    CHECK(z.size() == 4);

    try {
        gaussian_grid({{0.0, 1.0}, {0.0, 1.0}}, {2, 2}, 1.0, {0.8}, {1.0});
        FAIL("expected NotPositiveDefinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    }
}

TEST_CASE("von Mises weights: uniform, concentration, explicit values") {
    const SimplexWeights uniform = von_mises_weights(10, 0.0, 0.3);
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(uniform.w(i) == doctest::Approx(0.1));

    const SimplexWeights sharp = von_mises_weights(36, 50.0, 0.0);
    Eigen::Index argmax;
    sharp.w.maxCoeff(&argmax);
    CHECK(argmax == 0);

    // bins=4, kappa=1, location=0: weights proportional to {e, 1, 1/e, 1}
    const SimplexWeights four = von_mises_weights(4, 1.0, 0.0);
    const double norm = std::exp(1.0) + 1.0 + std::exp(-1.0) + 1.0;
    CHECK(four.w(0) == doctest::Approx(std::exp(1.0) / norm));
    CHECK(four.w(1) == doctest::Approx(1.0 / norm));
    CHECK(four.w(2) == doctest::Approx(std::exp(-1.0) / norm));
    CHECK(four.w(3) == doctest::Approx(1.0 / norm));
}
