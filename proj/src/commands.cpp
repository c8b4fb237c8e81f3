#include "ewalign/commands.hpp"

#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "ewalign/eval.hpp"
#include "ewalign/ew.hpp"
#include "ewalign/gw.hpp"
#include "ewalign/io.hpp"
#include "ewalign/ot.hpp"
#include "ewalign/spaces.hpp"
#include "ewalign/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ewalign {

namespace {

void emit_error(const std::string& code, const std::string& message) {
    json err;
    err["error"]["code"] = code;
    err["error"]["message"] = message;
    std::cerr << err.dump(2) << std::endl;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        emit_error(error_code_name(e.code()), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("Internal", e.what());
        return 2;
    }
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory: " + dir);
}

json trace_json(const std::vector<double>& v) { return json(v); }

void write_embed_artifacts(const RunConfig& run, const ReferenceSpace& z,
                           const LoadedSource& s1, const LoadedSource& s2,
                           const EmbedResult& result, json& report) {
    const std::string& dir = run.out_dir;
    write_csv_vector(dir + "/mu1.csv", result.mu1.w);
    write_csv_vector(dir + "/mu2.csv", result.mu2.w);
    write_csv_matrix(dir + "/gamma1.csv", result.gamma1.p);
    write_csv_matrix(dir + "/gamma2.csv", result.gamma2.p);
    write_csv_matrix(dir + "/pi.csv", result.pi.p);

    Matrix trace(static_cast<Eigen::Index>(result.objective_trace.size()), 5);
    for (Eigen::Index i = 0; i < trace.rows(); ++i) {
        trace(i, 0) = static_cast<double>(i + 1);
        trace(i, 1) = result.objective_trace[static_cast<size_t>(i)];
        trace(i, 2) = result.regularized_trace[static_cast<size_t>(i)];
        trace(i, 3) = result.objective_trace_alpha1[static_cast<size_t>(i)];
        trace(i, 4) = result.objective_trace_alpha2[static_cast<size_t>(i)];
    }
    write_csv_matrix(dir + "/trace.csv", trace);

    // Plot: scatter of barycentric projections in Euclidean targets,
    // mass-colored chart grids otherwise.
    std::string svg;
    if (z.geometry == Geometry::EuclideanGrid && z.points.cols() == 2) {
        const ProjectedPoints p1 = barycentric_projection(result.gamma1.p, z);
        const ProjectedPoints p2 = barycentric_projection(result.gamma2.p, z);
        svg = svg_scatter({{p1.points, p1.mass, "#d62728", "source 1"},
                           {p2.points, p2.mass, "#1f77b4", "source 2"}},
                          "joint embedding");
        write_csv_matrix(dir + "/projection1.csv", p1.points);
        write_csv_matrix(dir + "/projection2.csv", p2.points);
    } else if (z.geometry == Geometry::SphereGrid || z.geometry == Geometry::TorusGrid) {
        int rows = 1, cols = static_cast<int>(z.size());
        if (z.points.cols() == 2) {
            // chart grid: rows indexed by the first axis
            std::vector<double> first;
            for (Eigen::Index i = 0; i < z.points.rows(); ++i) {
                const double v = z.points(i, 0);
                if (first.empty() || std::abs(first.back() - v) > 1e-12) {
                    if (std::find_if(first.begin(), first.end(), [&](double x) {
                            return std::abs(x - v) < 1e-12;
                        }) == first.end())
                        first.push_back(v);
                }
            }
            rows = static_cast<int>(first.size());
            cols = static_cast<int>(z.size()) / std::max(rows, 1);
        }
        svg = svg_grid_mass({result.mu1.w, result.mu2.w}, rows, cols, {"mu1", "mu2"},
                            "embedded marginals");
    } else {
        svg = svg_grid_mass({result.mu1.w, result.mu2.w}, 1, static_cast<int>(z.size()),
                            {"mu1", "mu2"}, "embedded marginals");
    }
    write_text_file(dir + "/embedding.svg", svg);

    report["solver"]["lambda"] = run.solver.lambda;
    report["solver"]["epsilon"] = run.solver.epsilon;
    report["solver"]["bcd_iters"] = run.solver.bcd_iters;
    report["solver"]["sinkhorn_tol"] = run.solver.sinkhorn_tol;
    report["converged"] = result.converged;
    report["iterations"] = result.iterations;
    report["selected_plan"] = result.selected_plan;
    report["final_objective"] = result.final_objective;
    report["objective_trace"] = trace_json(result.objective_trace);
    report["regularized_trace"] = trace_json(result.regularized_trace);
    report["sinkhorn_violations"] = trace_json(result.sinkhorn_violations);
    report["sizes"] = {{"n1", s1.space.size()}, {"n2", s2.space.size()}, {"m", z.size()}};
    report["normalization_scale"] = {{"source1", s1.normalization_scale},
                                     {"source2", s2.normalization_scale}};
    report["files"] = {"mu1.csv", "mu2.csv", "gamma1.csv", "gamma2.csv",
                       "pi.csv",  "trace.csv", "embedding.svg"};
}

}  // namespace

int cmd_embed(const std::string& config_path, const CliOverrides& overrides) {
    return guarded([&]() -> int {
        const RunConfig run = load_run_config(config_path, overrides);
        ensure_out_dir(run.out_dir);
        const LoadedSource s1 = load_source(run.source1, run.normalize, run.seed);
        const LoadedSource s2 = load_source(run.source2, run.normalize, run.seed + 1);
        const ReferenceSpace z = build_target(run.target);

        const EmbedResult result = solve_ew_lambda(s1.space, s2.space, z, run.solver);

        json report;
        write_embed_artifacts(run, z, s1, s2, result, report);
        write_text_file(run.out_dir + "/result.json", report.dump(2) + "\n");
        return result.converged ? 0 : 3;
    });
}

int cmd_distances(const std::string& config_path, const CliOverrides& overrides) {
    return guarded([&]() -> int {
        const RunConfig run = load_run_config(config_path, overrides);
        ensure_out_dir(run.out_dir);
        if (run.corpus.empty())
            throw Error(ErrorCode::InvalidConfig, "distances needs a corpus file list");

        std::vector<MmSpace> corpus;
        for (const std::string& path : run.corpus) {
            SourceSpec spec;
            spec.type = run.kind == PairwiseKind::W2SharedSupport ? SourceType::Distance
                                                                  : SourceType::Image;
            spec.path = path;
            if (run.kind == PairwiseKind::W2SharedSupport) {
                // Shared pixel grid: the image file holds intensities over the
                // full grid; the common metric is the grid Euclidean metric.
                const Matrix img = read_csv_matrix(path);
                const Eigen::Index rows = img.rows(), cols = img.cols();
                const double denom = static_cast<double>(std::max(rows, cols) - 1);
                const Eigen::Index n = rows * cols;
                Matrix d(n, n);
                Vector w(n);
                for (Eigen::Index r = 0; r < rows; ++r)
                    for (Eigen::Index c = 0; c < cols; ++c) {
                        const Eigen::Index i = r * cols + c;
                        w(i) = std::max(0.0, img(r, c));
                        for (Eigen::Index r2 = 0; r2 < rows; ++r2)
                            for (Eigen::Index c2 = 0; c2 < cols; ++c2) {
                                const Eigen::Index j = r2 * cols + c2;
                                const double dx = static_cast<double>(c - c2) / denom;
                                const double dy = static_cast<double>(r - r2) / denom;
                                d(i, j) = std::sqrt(dx * dx + dy * dy);
                            }
                    }
                if (w.sum() <= 0.0)
                    throw Error(ErrorCode::AllMassZero, "image has no positive pixels: " + path);
                w /= w.sum();
                corpus.push_back(validate_mm_space(d, w));
            } else {
                corpus.push_back(load_source(spec, run.normalize, run.seed).space);
            }
        }

        ReferenceSpace z;
        if (run.kind == PairwiseKind::EwLambda) {
            z = build_target(run.target);
        } else {
            z.dist = corpus.front().dist;
            z.geometry = Geometry::Custom;
        }

        PairwiseOptions opts;
        opts.kind = run.kind;
        opts.ew = run.solver;
        opts.gw = run.gw;
        opts.threads = run.threads;
        const Matrix d = pairwise_distance_matrix(corpus, z, opts);

        write_csv_matrix(run.out_dir + "/distances.csv", d);
        write_text_file(run.out_dir + "/distances.svg", svg_heatmap(d, "pairwise distances"));

        json report;
        report["kind"] = run.kind == PairwiseKind::W2SharedSupport
                             ? "w2"
                             : (run.kind == PairwiseKind::Gw ? "gw" : "ew_lambda");
        report["size"] = corpus.size();
        if (!run.corpus_labels.empty() && run.corpus_labels.size() == corpus.size()) {
            double intra = 0.0, inter = 0.0;
            int n_intra = 0, n_inter = 0;
            for (size_t i = 0; i < corpus.size(); ++i)
                for (size_t j = i + 1; j < corpus.size(); ++j) {
                    if (run.corpus_labels[i] == run.corpus_labels[j]) {
                        intra += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        ++n_intra;
                    } else {
                        inter += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        ++n_inter;
                    }
                }
            if (n_intra > 0) report["mean_intra"] = intra / n_intra;
            if (n_inter > 0) report["mean_inter"] = inter / n_inter;
        }
        write_text_file(run.out_dir + "/distances.json", report.dump(2) + "\n");
        return 0;
    });
}

int cmd_eval(const std::string& config_path, const CliOverrides& overrides) {
    return guarded([&]() -> int {
        const RunConfig run = load_run_config(config_path, overrides);
        ensure_out_dir(run.out_dir);
        const LoadedSource s1 = load_source(run.source1, run.normalize, run.seed);
        const LoadedSource s2 = load_source(run.source2, run.normalize, run.seed + 1);
        if (s1.labels.empty() || s2.labels.empty())
            throw Error(ErrorCode::InvalidConfig, "eval needs label files for both sources");
        const ReferenceSpace z = build_target(run.target);

        const EmbedResult result = solve_ew_lambda(s1.space, s2.space, z, run.solver);
        const ProjectedPoints p1 = barycentric_projection(result.gamma1.p, z);
        const ProjectedPoints p2 = barycentric_projection(result.gamma2.p, z);

        json scores;
        scores["foscttm"] = foscttm(p1, p2);
        scores["foscttm_symmetric"] = foscttm_symmetric(p1, p2);
        scores["knn_accuracy"] =
            knn_transfer_accuracy(p1, s1.labels, p2, s2.labels, run.eval_knn_k);
        scores["knn_k"] = run.eval_knn_k;
        scores["converged"] = result.converged;
        scores["final_objective"] = result.final_objective;

        write_csv_matrix(run.out_dir + "/projection1.csv", p1.points);
        write_csv_matrix(run.out_dir + "/projection2.csv", p2.points);
        write_text_file(run.out_dir + "/scores.json", scores.dump(2) + "\n");
        return result.converged ? 0 : 3;
    });
}

int cmd_validate(const std::string& config_path, const CliOverrides& overrides) {
    return guarded([&]() -> int {
        const RunConfig run = load_run_config(config_path, overrides);
        json report;
        auto describe = [&](const SourceSpec& spec, std::uint64_t seed) {
            const LoadedSource src = load_source(spec, run.normalize, seed);
            json j;
            j["size"] = src.space.size();
            j["normalization_scale"] = src.normalization_scale;
            j["weight_sum"] = src.space.weights.w.sum();
            if (run.validate_triangle) {
                const double worst = max_triangle_violation(src.space.dist.d);
                j["triangle_violation"] = worst;
                j["triangle_ok"] = worst <= 1e-9;
            }
            return j;
        };
        report["source1"] = describe(run.source1, run.seed);
        report["source2"] = describe(run.source2, run.seed + 1);
        const ReferenceSpace z = build_target(run.target);
        report["target"] = {{"size", z.size()}, {"geometry", geometry_name(z.geometry)}};
        report["valid"] = true;
        std::cout << report.dump(2) << std::endl;
        return 0;
    });
}

int cmd_circle_bench(const CircleBenchArgs& args) {
    return guarded([&]() -> int {
        if (args.bins < 2) throw Error(ErrorCode::InvalidConfig, "bins must be at least 2");
        if (!(args.epsilon > 0.0))
            throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
        ensure_out_dir(args.out_dir);

        const ReferenceSpace z = circle_space(args.bins);
        const SimplexWeights uniform = uniform_weights(args.bins);
        const MmSpace x1 = validate_mm_space(z.dist.d, uniform.w);

        Matrix table(static_cast<Eigen::Index>(args.kappas.size() * args.lambdas.size()), 4);
        std::vector<CurveSeries> curves;
        CurveSeries exact_curve;
        exact_curve.color = "#000000";
        exact_curve.name = "EW^2 (exact)";

        Eigen::Index row = 0;
        std::vector<std::vector<double>> per_lambda(args.lambdas.size());
        bool all_converged = true;
        for (double kappa : args.kappas) {
            const SimplexWeights vm = von_mises_weights(args.bins, kappa, args.location);
            const MmSpace x2 = validate_mm_space(z.dist.d, vm.w);
            const double ew = circular_w2(uniform.w, vm.w);
            exact_curve.x.push_back(kappa);
            exact_curve.y.push_back(ew * ew);

            for (size_t li = 0; li < args.lambdas.size(); ++li) {
                EwConfig cfg;
                cfg.lambda = args.lambdas[li];
                cfg.epsilon = args.epsilon;
                cfg.bcd_iters = args.bcd_iters;
                const EmbedResult result = solve_ew_lambda(x1, x2, z, cfg);
                all_converged = all_converged && result.converged;
                table(row, 0) = kappa;
                table(row, 1) = args.lambdas[li];
                table(row, 2) = ew * ew;
                table(row, 3) = result.final_objective;
                per_lambda[li].push_back(result.final_objective);
                ++row;
            }
        }

        static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
        for (size_t li = 0; li < args.lambdas.size(); ++li) {
            CurveSeries s;
            s.x = args.kappas;
            s.y = per_lambda[li];
            s.color = palette[li % 5];
            char buf[64];
            std::snprintf(buf, sizeof(buf), "EW_%g^2 (solver)", args.lambdas[li]);
            s.name = buf;
            curves.push_back(std::move(s));
        }
        curves.push_back(std::move(exact_curve));

        write_csv_matrix(args.out_dir + "/circle_bench.csv", table);
        write_text_file(args.out_dir + "/circle_bench.svg",
                        svg_curves(curves, "circle benchmark", "kappa", "squared distance"));

        json report;
        report["bins"] = args.bins;
        report["epsilon"] = args.epsilon;
        report["kappas"] = args.kappas;
        report["lambdas"] = args.lambdas;
        report["columns"] = {"kappa", "lambda", "ew_sq_exact", "ew_lambda_sq"};
        write_text_file(args.out_dir + "/circle_bench.json", report.dump(2) + "\n");
        return all_converged ? 0 : 3;
    });
}

}  // namespace ewalign
