#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ewalign/core.hpp"
#include "ewalign/eval.hpp"
#include "ewalign/ew.hpp"
#include "ewalign/spaces.hpp"

namespace ewalign {

// INI-style keyed text: [section] headers, key = value lines, # comments.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& section,
                                             const std::string& key) const;
    bool has_section(const std::string& section) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class SourceType { Mesh, Features, Distance, Gmm, Image };

struct SourceSpec {
    SourceType type = SourceType::Distance;
    std::string path;
    std::string weights_path;  // optional
    std::string labels_path;   // optional
    int knn_k = 5;
    FeatureMetric knn_metric = FeatureMetric::Correlation;
    int subsample = 0;  // 0 = keep all points
};

struct TargetSpec {
    std::string geometry = "euclidean_grid";  // plus "circle"
    std::vector<int> resolution;
    std::vector<std::array<double, 2>> extent;
    double variance_scale = 1.0;
    std::vector<double> sigma_sq{0.8, 1.0};
    std::vector<double> offdiag{-0.2, 0.0, 0.2};
};

struct RunConfig {
    SourceSpec source1, source2;
    TargetSpec target;
    EwConfig solver;
    bool normalize = true;
    bool validate_triangle = false;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;
    int eval_knn_k = 5;
    // distances command
    PairwiseKind kind = PairwiseKind::EwLambda;
    std::vector<std::string> corpus;
    std::vector<int> corpus_labels;
    GwOptions gw;
};

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

RunConfig load_run_config(const std::string& path, const CliOverrides& overrides);

// A fully constructed input space plus bookkeeping for reporting.
struct LoadedSource {
    MmSpace space;
    double normalization_scale = 1.0;  // distances were divided by this
    std::vector<int> labels;
    Matrix features;  // only for feature sources
};

LoadedSource load_source(const SourceSpec& spec, bool normalize, std::uint64_t seed);
ReferenceSpace build_target(const TargetSpec& spec);

}  // namespace ewalign
