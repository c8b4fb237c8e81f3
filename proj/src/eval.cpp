#include "ewalign/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "ewalign/ot.hpp"

namespace ewalign {

ProjectedPoints barycentric_projection(const Matrix& gamma, const ReferenceSpace& z) {
    if (gamma.cols() != z.size())
        throw Error(ErrorCode::SizeMismatch, "coupling does not match reference space");
    if (z.geometry == Geometry::GaussianW2)
        throw Error(ErrorCode::UnsupportedGeometry,
                    "barycentric projection is undefined for gaussian_w2 targets");

    const Eigen::Index n = gamma.rows(), m = gamma.cols();
    const Eigen::Index dim = z.points.cols();
    ProjectedPoints out;
    out.points = Matrix::Zero(n, dim);
    out.mass = gamma.rowwise().sum();
    out.valid.assign(static_cast<size_t>(n), false);

    int n_valid = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (out.mass(j) < kProjectionMassThreshold) continue;
        out.valid[static_cast<size_t>(j)] = true;
        ++n_valid;
        for (Eigen::Index ax = 0; ax < dim; ++ax) {
            const bool periodic = ax < static_cast<Eigen::Index>(z.periodic.size()) &&
                                  z.periodic[static_cast<size_t>(ax)];
            if (!periodic) {
                double s = 0.0;
                for (Eigen::Index k = 0; k < m; ++k) s += gamma(j, k) * z.points(k, ax);
                out.points(j, ax) = s / out.mass(j);
            } else {
                double c = 0.0, s = 0.0;
                for (Eigen::Index k = 0; k < m; ++k) {
                    c += gamma(j, k) * std::cos(z.points(k, ax));
                    s += gamma(j, k) * std::sin(z.points(k, ax));
                }
                double angle = std::atan2(s, c);
                if (angle < 0.0) angle += 2.0 * EIGEN_PI;
                out.points(j, ax) = angle;
            }
        }
    }
    if (n_valid == 0) throw Error(ErrorCode::AllMassZero, "every projection row has zero mass");
    return out;
}

namespace {

std::vector<Eigen::Index> shared_valid(const ProjectedPoints& p1, const ProjectedPoints& p2) {
    if (p1.points.rows() != p2.points.rows())
        throw Error(ErrorCode::CountMismatch, "projected point counts differ");
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < p1.points.rows(); ++j)
        if (p1.valid[static_cast<size_t>(j)] && p2.valid[static_cast<size_t>(j)]) idx.push_back(j);
    return idx;
}

}  // namespace

double foscttm(const ProjectedPoints& p1, const ProjectedPoints& p2) {
    const std::vector<Eigen::Index> idx = shared_valid(p1, p2);
    const size_t n = idx.size();
    if (n == 0) return 0.0;
    double total = 0.0;
    for (Eigen::Index j : idx) {
        const double true_dist = (p1.points.row(j) - p2.points.row(j)).norm();
        for (Eigen::Index k : idx)
            if ((p1.points.row(j) - p2.points.row(k)).norm() < true_dist) total += 1.0;
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

double foscttm_symmetric(const ProjectedPoints& p1, const ProjectedPoints& p2) {
    return 0.5 * (foscttm(p1, p2) + foscttm(p2, p1));
}

double knn_transfer_accuracy(const ProjectedPoints& train, const std::vector<int>& train_labels,
                             const ProjectedPoints& test, const std::vector<int>& test_labels,
                             int k) {
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
    if (static_cast<Eigen::Index>(train_labels.size()) != train.points.rows() ||
        static_cast<Eigen::Index>(test_labels.size()) != test.points.rows())
        throw Error(ErrorCode::CountMismatch, "label counts do not match point counts");

    std::vector<Eigen::Index> train_idx;
    for (Eigen::Index i = 0; i < train.points.rows(); ++i)
        if (train.valid[static_cast<size_t>(i)]) train_idx.push_back(i);
    if (train_idx.empty()) throw Error(ErrorCode::AllMassZero, "no valid train points");

    int correct = 0, counted = 0;
    std::vector<std::pair<double, Eigen::Index>> dists;
    for (Eigen::Index t = 0; t < test.points.rows(); ++t) {
        if (!test.valid[static_cast<size_t>(t)]) continue;
        ++counted;
        dists.clear();
        for (Eigen::Index i : train_idx)
            dists.emplace_back((test.points.row(t) - train.points.row(i)).norm(), i);
        const size_t kk = std::min<size_t>(static_cast<size_t>(k), dists.size());
        std::partial_sort(dists.begin(), dists.begin() + static_cast<long>(kk), dists.end());

        // label -> (votes, summed distance)
        std::map<int, std::pair<int, double>> votes;
        for (size_t r = 0; r < kk; ++r) {
            auto& v = votes[train_labels[static_cast<size_t>(dists[r].second)]];
            v.first += 1;
            v.second += dists[r].first;
        }
        int best_label = 0;
        int best_votes = -1;
        double best_sum = 0.0;
        for (const auto& [label, v] : votes) {
            const bool better = v.first > best_votes ||
                                (v.first == best_votes && v.second < best_sum) ||
                                (v.first == best_votes && v.second == best_sum && label < best_label);
            if (better) {
                best_label = label;
                best_votes = v.first;
                best_sum = v.second;
            }
        }
        if (best_label == test_labels[static_cast<size_t>(t)]) ++correct;
    }
    return counted > 0 ? static_cast<double>(correct) / counted : 0.0;
}

Matrix pairwise_distance_matrix(const std::vector<MmSpace>& corpus, const ReferenceSpace& z,
                                const PairwiseOptions& opts) {
    const Eigen::Index n = static_cast<Eigen::Index>(corpus.size());
    if (n == 0) throw Error(ErrorCode::IncompatibleCorpus, "corpus is empty");

    if (opts.kind == PairwiseKind::W2SharedSupport) {
        const Eigen::Index sz = corpus.front().size();
        for (const MmSpace& x : corpus) {
            if (x.size() != sz ||
                (x.dist.d - corpus.front().dist.d).cwiseAbs().maxCoeff() > 1e-9)
                throw Error(ErrorCode::IncompatibleCorpus,
                            "w2 requires all corpus measures on one shared support");
        }
    }

    Matrix d = Matrix::Zero(n, n);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    auto compute = [&](Eigen::Index i, Eigen::Index j) {
        switch (opts.kind) {
            case PairwiseKind::W2SharedSupport: {
                const Matrix cost = corpus[static_cast<size_t>(i)].dist.d.array().square();
                return std::sqrt(std::max(
                    0.0, exact_ot(cost, corpus[static_cast<size_t>(i)].weights.w,
                                  corpus[static_cast<size_t>(j)].weights.w)
                             .cost));
            }
            case PairwiseKind::Gw: {
                const GwResult r = gw_entropic(corpus[static_cast<size_t>(i)],
                                               corpus[static_cast<size_t>(j)].dist,
                                               corpus[static_cast<size_t>(j)].weights, opts.gw);
                return std::sqrt(std::max(0.0, r.objective));
            }
            case PairwiseKind::EwLambda: {
                const EmbedResult r = solve_ew_lambda(corpus[static_cast<size_t>(i)],
                                                      corpus[static_cast<size_t>(j)], z, opts.ew);
                return std::sqrt(std::max(0.0, r.final_objective));
            }
        }
        return 0.0;
    };

    if (opts.threads <= 1) {
        for (const auto& [i, j] : pairs) {
            const double v = compute(i, j);
            d(i, j) = v;
            d(j, i) = v;
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < opts.threads; ++t)
            pool.emplace_back([&] {
                for (size_t p = next.fetch_add(1); p < pairs.size(); p = next.fetch_add(1)) {
                    const auto [i, j] = pairs[p];
                    const double v = compute(i, j);
                    d(i, j) = v;
                    d(j, i) = v;
                }
            });
        for (auto& th : pool) th.join();
    }
    return d;
}

}  // namespace ewalign
