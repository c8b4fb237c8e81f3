#include "ewalign/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "ewalign/io.hpp"
#include "ewalign/spaces.hpp"

namespace ewalign {

namespace {

std::string trim(const std::string& s) {
    const size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ';') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cur = trim(cur);
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::InvalidConfig,
                            "bad section header on line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidConfig,
                        "expected key = value on line " + std::to_string(lineno));
        cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    return parse_string(read_text_file(path));
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

bool KeyValueConfig::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

std::string KeyValueConfig::get(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw Error(ErrorCode::InvalidConfig, "missing config key [" + section + "] " + key);
    return sections_.at(section).at(key);
}

std::string KeyValueConfig::get_or(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key) const {
    try {
        return std::stod(get(section, key));
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidConfig, "config key [" + section + "] " + key +
                                                  " is not numeric");
    }
}

double KeyValueConfig::get_double_or(const std::string& section, const std::string& key,
                                     double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int KeyValueConfig::get_int_or(const std::string& section, const std::string& key,
                               int fallback) const {
    return has(section, key) ? static_cast<int>(std::llround(get_double(section, key))) : fallback;
}

bool KeyValueConfig::get_bool_or(const std::string& section, const std::string& key,
                                 bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::InvalidConfig, "config key [" + section + "] " + key +
                                              " is not a boolean");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& section,
                                                    const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split_list(get(section, key))) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidConfig,
                        "config key [" + section + "] " + key + " has a non-numeric item");
        }
    }
    return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& section,
                                                         const std::string& key) const {
    return split_list(get(section, key));
}

namespace {

SourceSpec parse_source(const KeyValueConfig& cfg, const std::string& section) {
    SourceSpec spec;
    const std::string type = cfg.get(section, "type");
    if (type == "mesh")
        spec.type = SourceType::Mesh;
    else if (type == "features")
        spec.type = SourceType::Features;
    else if (type == "distance")
        spec.type = SourceType::Distance;
    else if (type == "gmm")
        spec.type = SourceType::Gmm;
    else if (type == "image")
        spec.type = SourceType::Image;
    else
        throw Error(ErrorCode::InvalidConfig, "unknown source type '" + type + "'");
    spec.path = cfg.get(section, "path");
    spec.weights_path = cfg.get_or(section, "weights", "");
    spec.labels_path = cfg.get_or(section, "labels", "");
    spec.knn_k = cfg.get_int_or(section, "knn_k", 5);
    const std::string metric = cfg.get_or(section, "knn_metric", "correlation");
    if (metric == "euclidean")
        spec.knn_metric = FeatureMetric::Euclidean;
    else if (metric == "correlation")
        spec.knn_metric = FeatureMetric::Correlation;
    else
        throw Error(ErrorCode::InvalidConfig, "unknown knn metric '" + metric + "'");
    spec.subsample = cfg.get_int_or(section, "subsample", 0);
    return spec;
}

TargetSpec parse_target(const KeyValueConfig& cfg) {
    TargetSpec spec;
    spec.geometry = cfg.get_or("target", "geometry", "euclidean_grid");
    if (cfg.has("target", "resolution")) {
        for (double v : cfg.get_double_list("target", "resolution"))
            spec.resolution.push_back(static_cast<int>(std::llround(v)));
    }
    if (cfg.has("target", "extent")) {
        const std::vector<double> flat = cfg.get_double_list("target", "extent");
        if (flat.size() % 2 != 0)
            throw Error(ErrorCode::InvalidConfig, "extent needs lo,hi pairs per axis");
        for (size_t i = 0; i + 1 < flat.size(); i += 2)
            spec.extent.push_back({flat[i], flat[i + 1]});
    }
    spec.variance_scale = cfg.get_double_or("target", "variance_scale", 1.0);
    if (cfg.has("target", "sigma_sq")) spec.sigma_sq = cfg.get_double_list("target", "sigma_sq");
    if (cfg.has("target", "offdiag")) spec.offdiag = cfg.get_double_list("target", "offdiag");
    return spec;
}

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw Error(ErrorCode::IoError, "file does not exist: " + path);
}

// Relative paths are tried against the working directory first, then against
// the directory holding the config file.
std::string resolve_path(const std::string& path, const std::string& config_dir) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
    if (std::filesystem::exists(path)) return path;
    const std::filesystem::path alt = std::filesystem::path(config_dir) / path;
    if (std::filesystem::exists(alt)) return alt.string();
    return path;
}

void resolve_source_paths(SourceSpec& spec, const std::string& config_dir) {
    spec.path = resolve_path(spec.path, config_dir);
    spec.weights_path = resolve_path(spec.weights_path, config_dir);
    spec.labels_path = resolve_path(spec.labels_path, config_dir);
}

}  // namespace

RunConfig load_run_config(const std::string& path, const CliOverrides& overrides) {
    require_file(path);
    const KeyValueConfig cfg = KeyValueConfig::parse_file(path);
    RunConfig run;
    if (cfg.has_section("source1")) run.source1 = parse_source(cfg, "source1");
    if (cfg.has_section("source2")) run.source2 = parse_source(cfg, "source2");
    run.target = parse_target(cfg);

    run.solver.lambda = cfg.get_double_or("solver", "lambda", 100.0);
    run.solver.epsilon = cfg.get_double_or("solver", "epsilon", 1e-3);
    run.solver.bcd_iters = cfg.get_int_or("solver", "bcd_iters", 40);
    run.solver.sinkhorn_tol = cfg.get_double_or("solver", "sinkhorn_tol", 1e-7);
    run.solver.sinkhorn_max_iter = cfg.get_int_or("solver", "sinkhorn_max_iter", 10000);
    validate_ew_config(run.solver);
    run.normalize = cfg.get_bool_or("solver", "normalize", true);
    run.validate_triangle = cfg.get_bool_or("solver", "validate_triangle", false);

    run.out_dir = cfg.get_or("output", "dir", "out");
    run.seed = static_cast<std::uint64_t>(cfg.get_int_or("solver", "seed", 0));
    run.eval_knn_k = cfg.get_int_or("eval", "knn_k", 5);
    if (run.eval_knn_k < 1)
        throw Error(ErrorCode::InvalidConfig, "eval knn_k must be at least 1");

    if (cfg.has_section("distances")) {
        const std::string kind = cfg.get_or("distances", "kind", "ew_lambda");
        if (kind == "w2")
            run.kind = PairwiseKind::W2SharedSupport;
        else if (kind == "gw")
            run.kind = PairwiseKind::Gw;
        else if (kind == "ew_lambda")
            run.kind = PairwiseKind::EwLambda;
        else
            throw Error(ErrorCode::InvalidConfig, "unknown distances kind '" + kind + "'");
        if (cfg.has("distances", "corpus")) run.corpus = cfg.get_string_list("distances", "corpus");
        if (cfg.has("distances", "labels")) {
            for (double v : cfg.get_double_list("distances", "labels"))
                run.corpus_labels.push_back(static_cast<int>(std::llround(v)));
        }
        run.gw.epsilon = cfg.get_double_or("distances", "gw_epsilon", run.solver.epsilon);
        run.gw.max_iter = cfg.get_int_or("distances", "gw_max_iter", 200);
    }

    const std::string config_dir = std::filesystem::path(path).parent_path().string();
    resolve_source_paths(run.source1, config_dir);
    resolve_source_paths(run.source2, config_dir);
    for (std::string& entry : run.corpus) entry = resolve_path(entry, config_dir);

    if (overrides.out_dir) run.out_dir = *overrides.out_dir;
    if (overrides.seed) run.seed = *overrides.seed;
    if (overrides.threads) run.threads = *overrides.threads;
    return run;
}

namespace {

MmSpace subsample_space(const MmSpace& space, int keep, std::uint64_t seed) {
    const Eigen::Index n = space.size();
    if (keep <= 0 || keep >= n) return space;
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<size_t>(keep));
    std::sort(idx.begin(), idx.end());

    Matrix d(keep, keep);
    Vector w(keep);
    std::vector<int> labels;
    for (int i = 0; i < keep; ++i) {
        w(i) = space.weights.w(idx[static_cast<size_t>(i)]);
        for (int j = 0; j < keep; ++j)
            d(i, j) = space.dist.d(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        if (!space.labels.empty())
            labels.push_back(space.labels[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
    }
    w /= w.sum();
    return validate_mm_space(d, w, labels);
}

}  // namespace

LoadedSource load_source(const SourceSpec& spec, bool normalize, std::uint64_t seed) {
    require_file(spec.path);
    LoadedSource out;
    Matrix dist;
    Vector weights;

    switch (spec.type) {
        case SourceType::Mesh: {
            const OffMesh mesh = read_off_mesh(spec.path);
            const Graph g = mesh_to_graph(mesh.vertices, mesh.faces);
            dist = dijkstra_all_pairs(g).d;
            weights = Vector::Constant(dist.rows(), 1.0 / static_cast<double>(dist.rows()));
            break;
        }
        case SourceType::Features: {
            out.features = read_csv_matrix(spec.path);
            const Graph g = knn_graph(out.features, spec.knn_k, spec.knn_metric);
            dist = dijkstra_all_pairs(g).d;
            weights = Vector::Constant(dist.rows(), 1.0 / static_cast<double>(dist.rows()));
            break;
        }
        case SourceType::Distance: {
            dist = read_csv_matrix(spec.path);
            if (!spec.weights_path.empty()) {
                require_file(spec.weights_path);
                weights = read_csv_vector(spec.weights_path);
                weights /= weights.sum();
            } else {
                weights = Vector::Constant(dist.rows(), 1.0 / static_cast<double>(dist.rows()));
            }
            break;
        }
        case SourceType::Gmm: {
            const GmmModel gmm = read_gmm_json(spec.path);
            const Eigen::Index n = static_cast<Eigen::Index>(gmm.components.size());
            dist.resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                dist(i, i) = 0.0;
                for (Eigen::Index j = i + 1; j < n; ++j) {
                    const double d = bures_wasserstein(gmm.components[static_cast<size_t>(i)],
                                                       gmm.components[static_cast<size_t>(j)]);
                    dist(i, j) = d;
                    dist(j, i) = d;
                }
            }
            weights = Eigen::Map<const Vector>(gmm.weights.data(), n);
            weights /= weights.sum();
            break;
        }
        case SourceType::Image: {
            const Matrix img = read_csv_matrix(spec.path);
            std::vector<std::pair<double, double>> pts;
            std::vector<double> mass;
            const double denom = static_cast<double>(std::max(img.rows(), img.cols()) - 1);
            for (Eigen::Index r = 0; r < img.rows(); ++r)
                for (Eigen::Index c = 0; c < img.cols(); ++c)
                    if (img(r, c) > 0.0) {
                        pts.emplace_back(static_cast<double>(c) / denom,
                                         static_cast<double>(r) / denom);
                        mass.push_back(img(r, c));
                    }
            if (pts.empty()) throw Error(ErrorCode::AllMassZero, "image has no positive pixels");
            const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
            dist.resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                dist(i, i) = 0.0;
                for (Eigen::Index j = i + 1; j < n; ++j) {
                    const double dx = pts[static_cast<size_t>(i)].first - pts[static_cast<size_t>(j)].first;
                    const double dy = pts[static_cast<size_t>(i)].second - pts[static_cast<size_t>(j)].second;
                    const double d = std::sqrt(dx * dx + dy * dy);
                    dist(i, j) = d;
                    dist(j, i) = d;
                }
            }
            weights = Eigen::Map<const Vector>(mass.data(), n);
            weights /= weights.sum();
            break;
        }
    }

    if (normalize) {
        const double scale = dist.maxCoeff();
        if (scale > 0.0) {
            dist /= scale;
            out.normalization_scale = scale;
        }
    }

    std::vector<int> labels;
    if (!spec.labels_path.empty()) {
        require_file(spec.labels_path);
        labels = read_labels_csv(spec.labels_path);
        if (static_cast<Eigen::Index>(labels.size()) != dist.rows())
            throw Error(ErrorCode::SizeMismatch,
                        "label file length does not match source size: " + spec.labels_path);
    }

    MmSpace space = validate_mm_space(dist, weights, labels);
    space = subsample_space(space, spec.subsample, seed);
    out.space = std::move(space);
    out.labels = out.space.labels;
    return out;
}

ReferenceSpace build_target(const TargetSpec& spec) {
    if (spec.geometry == "euclidean_grid") {
        if (spec.resolution.empty())
            throw Error(ErrorCode::InvalidConfig, "euclidean_grid needs a resolution");
        std::vector<std::array<double, 2>> extent = spec.extent;
        if (extent.empty()) extent.assign(spec.resolution.size(), {0.0, 1.0});
        return euclidean_grid(extent, spec.resolution);
    }
    if (spec.geometry == "sphere_grid") {
        if (spec.resolution.size() != 2)
            throw Error(ErrorCode::InvalidConfig, "sphere_grid needs a 2-axis resolution");
        return sphere_grid(spec.resolution[0], spec.resolution[1]);
    }
    if (spec.geometry == "torus_grid") {
        if (spec.resolution.size() != 2)
            throw Error(ErrorCode::InvalidConfig, "torus_grid needs a 2-axis resolution");
        return torus_grid(spec.resolution[0], spec.resolution[1]);
    }
    if (spec.geometry == "circle") {
        if (spec.resolution.size() != 1)
            throw Error(ErrorCode::InvalidConfig, "circle needs a single bin count");
        return circle_space(spec.resolution[0]);
    }
    if (spec.geometry == "gaussian_w2") {
        if (spec.resolution.size() != 2 || spec.extent.size() != 2)
            throw Error(ErrorCode::InvalidConfig, "gaussian_w2 needs 2d mean extent/resolution");
        return gaussian_grid(spec.extent, spec.resolution, spec.variance_scale, spec.sigma_sq,
                             spec.offdiag);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown target geometry '" + spec.geometry + "'");
}

}  // namespace ewalign
