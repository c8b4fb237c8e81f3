// Acceptance suite: one criterion per command-line argument (1..7), each
// printing a [PASS]/[FAIL] line with the measured values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ewalign/eval.hpp"
#include "ewalign/ew.hpp"
#include "ewalign/gw.hpp"
#include "ewalign/io.hpp"
#include "ewalign/ot.hpp"
#include "ewalign/spaces.hpp"
#include "support/oracles.hpp"

using namespace ewalign;

namespace {

struct Outcome {
    bool pass = true;
    std::string details;
};

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: circle benchmark at 90 bins, kappa in {0,1,2,4}, eps = 1e-3.
Outcome criterion1() {
    Outcome out;
    const int bins = 90;
    const ReferenceSpace z = circle_space(bins);
    const SimplexWeights uniform = uniform_weights(bins);
    const MmSpace x1 = validate_mm_space(z.dist.d, uniform.w);

    std::ostringstream os;
    for (double kappa : {0.0, 1.0, 2.0, 4.0}) {
        const SimplexWeights vm = von_mises_weights(bins, kappa, 0.0);
        const MmSpace x2 = validate_mm_space(z.dist.d, vm.w);
        const double ew = circular_w2(uniform.w, vm.w);
        const double ew_sq = ew * ew;

        auto solve = [&](double lambda) {
            EwConfig cfg;
            cfg.lambda = lambda;
            cfg.epsilon = 1e-3;
            cfg.bcd_iters = 40;
            cfg.anneal_stages = 3;
            return solve_ew_lambda(x1, x2, z, cfg).final_objective;
        };
        const double ew20_sq = solve(20.0);
        const double ew02_sq = solve(0.2);

        const double fit = std::abs(ew20_sq - ew_sq) / std::max(ew_sq, 1e-6);
        const bool fit_ok = fit <= 0.05;
        const bool under_ok = ew02_sq <= ew_sq + 1e-6;
        os << "  kappa=" << kappa << ": EW2=" << fmt(ew_sq) << " EW20_2=" << fmt(ew20_sq)
           << " rel=" << fmt(fit) << (fit_ok ? "" : " [fit FAIL]") << "; EW0.2_2="
           << fmt(ew02_sq) << (under_ok ? "" : " [underestimation FAIL]") << "\n";
        out.pass = out.pass && fit_ok && under_ok;
    }
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 2: shape-class block structure on synthetic 16x16 binary shapes.

Matrix rasterize_shape(const std::vector<Eigen::Vector2d>& pts, double angle,
                       const Eigen::Vector2d& shift) {
    Matrix img = Matrix::Zero(16, 16);
    const double c = std::cos(angle), s = std::sin(angle);
    for (const auto& p : pts) {
        const double x = c * p.x() - s * p.y() + shift.x() + 7.5;
        const double y = s * p.x() + c * p.y() + shift.y() + 7.5;
        const int col = static_cast<int>(std::lround(x));
        const int row = static_cast<int>(std::lround(y));
        if (col >= 0 && col < 16 && row >= 0 && row < 16) img(row, col) = 1.0;
    }
    return img;
}

std::vector<Eigen::Vector2d> shape_points(int klass) {
    std::vector<Eigen::Vector2d> pts;
    if (klass == 0) {  // elongated bar
        for (double x = -5.5; x <= 5.5; x += 0.5)
            for (double y = -1.0; y <= 1.0; y += 0.5) pts.emplace_back(x, y);
    } else if (klass == 1) {  // L shape
        for (double x = -4.5; x <= 1.0; x += 0.5)
            for (double y = -4.5; y <= -2.0; y += 0.5) pts.emplace_back(x, y);
        for (double x = -4.5; x <= -2.0; x += 0.5)
            for (double y = -4.5; y <= 2.5; y += 0.5) pts.emplace_back(x, y);
    } else {  // ring
        for (double r = 4.0; r <= 5.2; r += 0.6)
            for (int a = 0; a < 40; ++a) {
                const double th = 2.0 * EIGEN_PI * a / 40;
                pts.emplace_back(r * std::cos(th), r * std::sin(th));
            }
    }
    return pts;
}

MmSpace image_space(const Matrix& img) {
    std::vector<Eigen::Vector2d> sup;
    for (Eigen::Index r = 0; r < img.rows(); ++r)
        for (Eigen::Index c = 0; c < img.cols(); ++c)
            if (img(r, c) > 0.0) sup.emplace_back(c / 15.0, r / 15.0);
    const Eigen::Index n = static_cast<Eigen::Index>(sup.size());
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dij = (sup[static_cast<size_t>(i)] - sup[static_cast<size_t>(j)]).norm();
            d(i, j) = dij;
            d(j, i) = dij;
        }
    }
    return validate_mm_space(d, Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Outcome criterion2() {
    Outcome out;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * EIGEN_PI);
    std::uniform_real_distribution<double> shift(-1.5, 1.5);

    std::vector<Matrix> images;
    std::vector<int> labels;
    for (int klass = 0; klass < 3; ++klass)
        for (int rep = 0; rep < 3; ++rep) {
            images.push_back(rasterize_shape(shape_points(klass), angle(rng),
                                             {shift(rng), shift(rng)}));
            labels.push_back(klass);
        }

    // support-filtered corpora for GW / EW, shared-grid weights for W2
    std::vector<MmSpace> corpus;
    for (const Matrix& img : images) corpus.push_back(image_space(img));

    const ReferenceSpace grid = euclidean_grid({{0.0, 1.0}, {0.0, 1.0}}, {16, 16});
    std::vector<MmSpace> shared;
    for (const Matrix& img : images) {
        Vector w(256);
        for (Eigen::Index r = 0; r < 16; ++r)
            for (Eigen::Index c = 0; c < 16; ++c) w(r * 16 + c) = img(r, c);
        w /= w.sum();
        shared.push_back(validate_mm_space(grid.dist.d, w));
    }

    PairwiseOptions ew_opts;
    ew_opts.kind = PairwiseKind::EwLambda;
    ew_opts.ew.lambda = 20.0;
    ew_opts.ew.epsilon = 2e-3;
    ew_opts.ew.bcd_iters = 12;
    ew_opts.ew.sinkhorn_tol = 1e-6;
    ew_opts.ew.sinkhorn_max_iter = 30;  // inexact half-steps; BCD still settles
    ew_opts.ew.anneal_stages = 2;
    const Matrix d_ew = pairwise_distance_matrix(corpus, grid, ew_opts);

    PairwiseOptions gw_opts;
    gw_opts.kind = PairwiseKind::Gw;
    gw_opts.gw.epsilon = 2e-3;
    gw_opts.gw.max_iter = 150;
    const Matrix d_gw = pairwise_distance_matrix(corpus, grid, gw_opts);

    PairwiseOptions w2_opts;
    w2_opts.kind = PairwiseKind::W2SharedSupport;
    const Matrix d_w2 = pairwise_distance_matrix(shared, grid, w2_opts);

    auto means = [&](const Matrix& d) {
        double intra = 0.0, inter = 0.0;
        int n_intra = 0, n_inter = 0;
        for (size_t i = 0; i < labels.size(); ++i)
            for (size_t j = i + 1; j < labels.size(); ++j) {
                if (labels[i] == labels[j]) {
                    intra += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    ++n_intra;
                } else {
                    inter += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    ++n_inter;
                }
            }
        return std::make_pair(intra / n_intra, inter / n_inter);
    };
    const auto [ew_intra, ew_inter] = means(d_ew);
    const auto [gw_intra, gw_inter] = means(d_gw);

    // W2 must fail on at least one class pair: some class's intra mean is not
    // below the inter mean toward some other class.
    bool w2_fails_somewhere = false;
    for (int c1 = 0; c1 < 3 && !w2_fails_somewhere; ++c1)
        for (int c2 = 0; c2 < 3; ++c2) {
            if (c1 == c2) continue;
            double intra = 0.0, inter = 0.0;
            int n_intra = 0, n_inter = 0;
            for (size_t i = 0; i < labels.size(); ++i)
                for (size_t j = i + 1; j < labels.size(); ++j) {
                    if (labels[i] == c1 && labels[j] == c1) {
                        intra += d_w2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        ++n_intra;
                    }
                    const int a = labels[i], b = labels[j];
                    if ((a == c1 && b == c2) || (a == c2 && b == c1)) {
                        inter += d_w2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        ++n_inter;
                    }
                }
            if (n_intra > 0 && n_inter > 0 && intra / n_intra >= inter / n_inter) {
                w2_fails_somewhere = true;
                break;
            }
        }

    const bool ew_ok = ew_intra < ew_inter;
    const bool gw_ok = gw_intra < gw_inter;
    out.pass = ew_ok && gw_ok && w2_fails_somewhere;
    std::ostringstream os;
    os << "  EW20 intra/inter = " << fmt(ew_intra) << "/" << fmt(ew_inter)
       << (ew_ok ? "" : " [FAIL]") << "; GW intra/inter = " << fmt(gw_intra) << "/"
       << fmt(gw_inter) << (gw_ok ? "" : " [FAIL]") << "; W2 fails a class pair: "
       << (w2_fails_somewhere ? "yes" : "no [FAIL]") << "\n";
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 3: lambda-limit properties on a fixed tiny instance.

ReferenceSpace lambda_limit_z() {
    Matrix pts(6, 2);
    pts << 0.74589031305653331, 0.74043615926261142,  //
        0.22907525903392201, 0.38102918168391353,     //
        0.26516875076261393, 0.86400983562560074,     //
        0.7807231924506447, 0.96481170240801539,      //
        0.0073545855395592344, 0.57871530636028956,   //
        0.49160001595598285, 0.97574700827312943;
    Matrix d(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    d /= d.maxCoeff();
    ReferenceSpace z;
    z.dist = validate_distance_matrix(d);
    z.geometry = Geometry::Custom;
    return z;
}

Outcome criterion3() {
    Outcome out;
    const ReferenceSpace z = lambda_limit_z();
    auto sub = [&](const std::vector<int>& idx) {
        Matrix d(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                d(i, j) = z.dist.d(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        return validate_mm_space(d, Vector::Constant(4, 0.25));
    };
    const MmSpace x1 = sub({0, 1, 2, 3});
    const MmSpace x2 = sub({2, 3, 4, 5});

    std::ostringstream os;

    // GW penalty across the lambda sweep
    std::vector<double> pens;
    for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
        EwConfig cfg;
        cfg.lambda = lambda;
        cfg.epsilon = 0.02;
        cfg.bcd_iters = 60;
        cfg.anneal_stages = 5;
        const EmbedResult r = solve_ew_lambda(x1, x2, z, cfg);
        const double w_part = (r.pi.p.array() * z.dist.d.array().square()).sum();
        pens.push_back((r.final_objective - w_part) / lambda);
    }
    bool monotone = true;
    for (size_t i = 1; i < pens.size(); ++i)
        if (pens[i] > pens[i - 1] + 1e-9) monotone = false;
    const bool small_at_end = pens.back() < 1e-3;
    os << "  GW penalties over lambda {1,10,100,1000}: " << fmt(pens[0]) << ", " << fmt(pens[1])
       << ", " << fmt(pens[2]) << ", " << fmt(pens[3])
       << (monotone ? "" : " [monotonicity FAIL]")
       << (small_at_end ? "" : " [<1e-3 at lambda=1000 FAIL]") << "\n";

    // lambda -> 0: marginals agree and realize the fixed-support barycenter
    EwConfig c0;
    c0.lambda = 0.01;
    c0.epsilon = 1e-4;
    c0.bcd_iters = 80;
    c0.anneal_stages = 6;
    const EmbedResult r0 = solve_ew_lambda(x1, x2, z, c0);
    Vector m1 = r0.mu1.w / r0.mu1.w.sum();
    Vector m2 = r0.mu2.w / r0.mu2.w.sum();
    const double w_mu = wasserstein2(z, SimplexWeights{m1}, SimplexWeights{m2}, W2Method::Exact);
    const bool mu_close = w_mu <= 1e-2 * z.diameter();

    GwOptions gopt;
    gopt.epsilon = 1e-4;
    gopt.max_iter = 500;
    const double sum_gw = gw_entropic(x1, z.dist, SimplexWeights{m1}, gopt).objective +
                          gw_entropic(x2, z.dist, SimplexWeights{m2}, gopt).objective;
    const GwWeightsResult bary = gw_barycenter_fixed_support(x1, x2, z, gopt);
    const double rel = std::abs(sum_gw - bary.objective) / std::max(bary.objective, 1e-12);
    const bool bary_ok = rel <= 0.05;
    os << "  lambda=0.01: W2(mu1,mu2)/diam = " << fmt(w_mu / z.diameter())
       << (mu_close ? "" : " [FAIL]") << "; sum GW^2 = " << fmt(sum_gw)
       << " vs barycenter " << fmt(bary.objective) << " (rel " << fmt(rel) << ")"
       << (bary_ok ? "" : " [FAIL]") << "\n";

    out.pass = monotone && small_at_end && mu_close && bary_ok;
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 4: chain-dense equivalence on 50 random instances.
Outcome criterion4() {
    Outcome out;
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> size_dist(2, 4);
    double worst_entry = 0.0, worst_obj = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n1 = size_dist(rng), m = size_dist(rng), n2 = size_dist(rng);
        ChainCosts costs;
        costs.a = oracles::random_matrix(rng, n1, m);
        costs.b = oracles::random_matrix(rng, m, m);
        costs.c = oracles::random_matrix(rng, m, n2);
        const Vector xi1 = oracles::random_simplex(rng, n1);
        const Vector xi2 = oracles::random_simplex(rng, n2);
        const double eps = 0.5;

        const ChainSolveResult sol = mm_sinkhorn_chain(costs, SimplexWeights{xi1},
                                                       SimplexWeights{xi2}, eps, 1e-13, 5000);
        const oracles::DenseChainOracle dense =
            oracles::dense_chain_sinkhorn(costs, xi1, xi2, eps, 1e-13, 5000);
        const DenseTensor4 chain_tensor = dense_tensor(sol.plan);
        for (Eigen::Index i = 0; i < n1; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                for (Eigen::Index k = 0; k < m; ++k)
                    for (Eigen::Index l = 0; l < n2; ++l)
                        worst_entry = std::max(worst_entry,
                                               std::abs(chain_tensor.at(i, j, k, l) -
                                                        dense.at(i, j, k, l)));

        // objective_f against the quadruple-loop F on the dense plan
        const Matrix dx1 = oracles::random_point_metric(rng, n1);
        const Matrix dx2 = oracles::random_point_metric(rng, n2);
        const Matrix dzm = oracles::random_point_metric(rng, m);
        const MmSpace sx1 = validate_mm_space(dx1, xi1);
        const MmSpace sx2 = validate_mm_space(dx2, xi2);
        ReferenceSpace z;
        z.dist = validate_distance_matrix(dzm);
        z.geometry = Geometry::Custom;
        const double lambda = 1.3;
        const ChainMarginals marg = extract(sol.plan);
        const double lib = objective_f(sx1, sx2, z, marg.pi, marg.gamma1, marg.gamma2, lambda);
        const double loop = oracles::f_lambda_dense(dense, dx1, dx2, dzm, lambda);
        worst_obj = std::max(worst_obj, std::abs(lib - loop));
    }
    out.pass = worst_entry < 1e-8 && worst_obj < 1e-9;
    out.details = "  max entrywise gap " + fmt(worst_entry) + " (tol 1e-8), max objective gap " +
                  fmt(worst_obj) + " (tol 1e-9)\n";
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 5: OT/GW kernel correctness.
Outcome criterion5() {
    Outcome out;
    std::mt19937_64 rng(505);
    std::ostringstream os;

    int exact_matches = 0;
    const Vector quarter = Vector::Constant(4, 0.25);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix c = oracles::random_matrix(rng, 4, 4);
        const OtResult r = exact_ot(c, quarter, quarter);
        const double solver_cost = oracles::plan_cost(r.plan.p, c);
        const double enum_cost = oracles::permutation_ot_min(c);
        if (solver_cost == enum_cost) ++exact_matches;
    }
    const bool ot_ok = exact_matches == 100;
    os << "  exact_ot vs permutation enumeration: " << exact_matches << "/100 exact"
       << (ot_ok ? "" : " [FAIL]") << "\n";

    double worst_gw = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + trial % 4, m = 2 + (trial / 4) % 4;
        const Matrix dx = oracles::random_point_metric(rng, n);
        const Matrix dz = oracles::random_point_metric(rng, m);
        Matrix gamma = oracles::random_matrix(rng, n, m);
        gamma /= gamma.sum();
        const double fast = gw_objective(DistanceMatrix{dx}, DistanceMatrix{dz}, gamma);
        const double loop = oracles::gw_objective_loop(dx, dz, gamma);
        worst_gw = std::max(worst_gw, std::abs(fast - loop));
    }
    const bool gw_ok = worst_gw < 1e-10;
    os << "  gw_objective fast vs loop: max gap " << fmt(worst_gw) << " (tol 1e-10)"
       << (gw_ok ? "" : " [FAIL]") << "\n";

    double worst_bw = 0.0;
    std::uniform_real_distribution<double> var(0.1, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = var(rng), b = var(rng);
        const Gaussian2 ga{{0, 0}, a * Eigen::Matrix2d::Identity()};
        const Gaussian2 gb{{0, 0}, b * Eigen::Matrix2d::Identity()};
        const double expect = std::sqrt(2.0) * std::abs(std::sqrt(a) - std::sqrt(b));
        worst_bw = std::max(worst_bw, std::abs(bures_wasserstein(ga, gb) - expect));
    }
    const bool bw_ok = worst_bw < 1e-12;
    os << "  bures isotropic closed form: max gap " << fmt(worst_bw) << " (tol 1e-12)"
       << (bw_ok ? "" : " [FAIL]") << "\n";

    out.pass = ot_ok && gw_ok && bw_ok;
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 6: monotone BCD on 20 random instances.
Outcome criterion6() {
    Outcome out;
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> size_dist(3, 5);
    std::uniform_real_distribution<double> lam_dist(0.5, 30.0);
    double worst_increase = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n1 = size_dist(rng), n2 = size_dist(rng), m = size_dist(rng);
        const MmSpace a = validate_mm_space(oracles::random_point_metric(rng, n1),
                                            oracles::random_simplex(rng, n1));
        const MmSpace b = validate_mm_space(oracles::random_point_metric(rng, n2),
                                            oracles::random_simplex(rng, n2));
        ReferenceSpace z;
        z.dist = validate_distance_matrix(oracles::random_point_metric(rng, m));
        z.geometry = Geometry::Custom;

        EwConfig cfg;
        cfg.lambda = lam_dist(rng);
        cfg.epsilon = 0.02;
        cfg.bcd_iters = 12;
        cfg.sinkhorn_tol = 1e-12;
        const EmbedResult r = solve_ew_lambda(a, b, z, cfg);
        for (size_t i = 1; i < r.regularized_trace.size(); ++i)
            worst_increase = std::max(worst_increase,
                                      r.regularized_trace[i] - r.regularized_trace[i - 1]);
    }
    out.pass = worst_increase <= 1e-9;
    out.details = "  max half-step increase of the regularized objective: " +
                  fmt(worst_increase) + " (tol 1e-9)\n";
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 7: planted-correspondence eval through the CLI.
Outcome criterion7() {
    Outcome out;
    const std::string dir = "acceptance_c7_tmp";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

    // latent curve with an asymmetric bend, labels by arc thirds
    const int n = 60;
    std::mt19937_64 rng(707);
    std::normal_distribution<double> noise(0.0, 0.004);
    Matrix latent(n, 2);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        latent(i, 0) = t + noise(rng);
        latent(i, 1) = 0.8 * t * t * (1.5 - t) + noise(rng);
        labels[static_cast<size_t>(i)] = i < n / 3 ? 0 : (i < 2 * n / 3 ? 1 : 2);
    }

    // two orthonormal feature maps into different dimensions
    auto orthonormal_map = [&](int d, double scale) {
        Matrix g(d, 2);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = gauss(rng);
        const Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ() * Matrix::Identity(d, 2);
        return (scale * q).eval();
    };
    const Matrix a1 = orthonormal_map(5, 1.4);
    const Matrix a2 = orthonormal_map(7, 0.7);
    write_csv_matrix(dir + "/features1.csv", latent * a1.transpose());
    write_csv_matrix(dir + "/features2.csv", latent * a2.transpose());
    {
        Vector lv(n);
        for (int i = 0; i < n; ++i) lv(i) = labels[static_cast<size_t>(i)];
        write_csv_vector(dir + "/labels1.csv", lv);
        write_csv_vector(dir + "/labels2.csv", lv);
    }

    std::ofstream cfg(dir + "/eval.ini");
    cfg << "[source1]\ntype = features\npath = " << dir << "/features1.csv\nlabels = " << dir
        << "/labels1.csv\nknn_k = 5\nknn_metric = euclidean\n\n"
        << "[source2]\ntype = features\npath = " << dir << "/features2.csv\nlabels = " << dir
        << "/labels2.csv\nknn_k = 5\nknn_metric = euclidean\n\n"
        << "[target]\ngeometry = euclidean_grid\nresolution = 12,12\nextent = 0,1,0,1\n\n"
        << "[solver]\nlambda = 50\nepsilon = 1.5e-3\nbcd_iters = 30\nnormalize = true\n\n"
        << "[eval]\nknn_k = 5\n\n[output]\ndir = " << dir << "/out\n";
    cfg.close();

    const std::string cmd = std::string(EWALIGN_CLI_PATH) + " eval --config " + dir + "/eval.ini";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        out.pass = false;
        out.details = "  eval command exited with " + std::to_string(rc) + "\n";
        return out;
    }
    const std::string scores = read_text_file(dir + "/out/scores.json");
    double foscttm_value = 1.0, knn_acc = 0.0;
    {
        const size_t pos = scores.find("\"foscttm\":");
        if (pos != std::string::npos) foscttm_value = std::atof(scores.c_str() + pos + 10);
        const size_t kpos = scores.find("\"knn_accuracy\":");
        if (kpos != std::string::npos) knn_acc = std::atof(scores.c_str() + kpos + 15);
    }
    out.pass = foscttm_value < 0.1;
    out.details = "  FOSCTTM = " + fmt(foscttm_value) + " (threshold 0.1), KNN accuracy = " +
                  fmt(knn_acc) + "\n";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    static const char* names[] = {
        "circle benchmark: EW_20 fits exact EW within 5%, EW_0.2 underestimates",
        "shape classes: intra < inter for EW_20 and GW, W2 fails a class pair",
        "lambda limits: monotone GW penalty, embedding at lambda=1000, barycenter at lambda->0",
        "chain Sinkhorn matches the dense 4-tensor oracle",
        "OT/GW kernels: exact_ot, gw expansion, Bures closed form",
        "monotone bi-convex objective across BCD half-steps",
        "planted-correspondence eval: FOSCTTM below 0.1",
    };
    int which = argc > 1 ? std::atoi(argv[1]) : 0;
    int bad = 0;
    for (int criterion = 1; criterion <= 7; ++criterion) {
        if (which != 0 && criterion != which) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        switch (criterion) {
            case 1: out = criterion1(); break;
            case 2: out = criterion2(); break;
            case 3: out = criterion3(); break;
            case 4: out = criterion4(); break;
            case 5: out = criterion5(); break;
            case 6: out = criterion6(); break;
            case 7: out = criterion7(); break;
        }
        std::printf("[%s] criterion %d: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", criterion,
                    names[criterion - 1], elapsed_since(t0));
        std::fputs(out.details.c_str(), stdout);
        if (!out.pass) ++bad;
    }
    return bad == 0 ? 0 : 1;
}
