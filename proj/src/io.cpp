#include "ewalign/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ewalign {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',' || ch == ';' || ch == '\t') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    // strip surrounding spaces
    for (auto& f : out) {
        size_t b = f.find_first_not_of(" ");
        size_t e = f.find_last_not_of(" ");
        f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
    }
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open file: " + path);
    return in;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        const std::vector<std::string> fields = split_fields(line);
        if (fields.empty()) continue;
        std::vector<double> row(fields.size());
        bool ok = true;
        for (size_t i = 0; i < fields.size(); ++i)
            if (!parse_double(fields[i], row[i])) {
                ok = false;
                break;
            }
        if (!ok) {
            if (first) {  // optional header row
                first = false;
                continue;
            }
            throw Error(ErrorCode::IoError, "non-numeric CSV row in " + path);
        }
        first = false;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::IoError, "empty CSV file: " + path);
    return rows;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
    const auto rows = read_csv_rows(path);
    const size_t cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols) throw Error(ErrorCode::IoError, "ragged CSV rows in " + path);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write file: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Vector read_csv_vector(const std::string& path) {
    const auto rows = read_csv_rows(path);
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    Vector v(static_cast<Eigen::Index>(flat.size()));
    for (size_t i = 0; i < flat.size(); ++i) v(static_cast<Eigen::Index>(i)) = flat[i];
    return v;
}

void write_csv_vector(const std::string& path, const Vector& v) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write file: " + path);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

std::vector<int> read_labels_csv(const std::string& path) {
    const Vector v = read_csv_vector(path);
    std::vector<int> labels(static_cast<size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        labels[static_cast<size_t>(i)] = static_cast<int>(std::llround(v(i)));
    return labels;
}

OffMesh read_off_mesh(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string token;
    if (!(in >> token)) throw Error(ErrorCode::IoError, "empty OFF file: " + path);
    long nv = 0, nf = 0, ne = 0;
    if (token == "OFF") {
        if (!(in >> nv >> nf >> ne)) throw Error(ErrorCode::IoError, "bad OFF counts in " + path);
    } else {
        nv = std::stol(token);
        if (!(in >> nf >> ne)) throw Error(ErrorCode::IoError, "bad OFF counts in " + path);
    }
    if (nv <= 0) throw Error(ErrorCode::IoError, "OFF file has no vertices: " + path);

    OffMesh mesh;
    mesh.vertices.resize(nv, 3);
    for (long i = 0; i < nv; ++i) {
        double x, y, z;
        if (!(in >> x >> y >> z)) throw Error(ErrorCode::IoError, "bad OFF vertex in " + path);
        mesh.vertices.row(i) << x, y, z;
    }
    for (long f = 0; f < nf; ++f) {
        int k;
        if (!(in >> k) || k < 3) throw Error(ErrorCode::IoError, "bad OFF face in " + path);
        std::vector<int> idx(static_cast<size_t>(k));
        for (int& v : idx)
            if (!(in >> v)) throw Error(ErrorCode::IoError, "bad OFF face index in " + path);
        for (int t = 1; t + 1 < k; ++t)
            mesh.faces.push_back({idx[0], idx[static_cast<size_t>(t)], idx[static_cast<size_t>(t + 1)]});
    }
    return mesh;
}

GmmModel read_gmm_json(const std::string& path) {
    std::ifstream in = open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::IoError, "invalid JSON in " + path + ": " + e.what());
    }
    if (!j.contains("weights") || !j.contains("means") || !j.contains("covariances"))
        throw Error(ErrorCode::IoError, "GMM JSON needs weights, means, covariances: " + path);

    GmmModel model;
    model.weights = j["weights"].get<std::vector<double>>();
    const auto& means = j["means"];
    const auto& covs = j["covariances"];
    if (means.size() != model.weights.size() || covs.size() != model.weights.size())
        throw Error(ErrorCode::IoError, "GMM JSON arrays have mismatched lengths: " + path);
    for (size_t i = 0; i < model.weights.size(); ++i) {
        Gaussian2 g;
        g.mean << means[i][0].get<double>(), means[i][1].get<double>();
        g.cov << covs[i][0][0].get<double>(), covs[i][0][1].get<double>(),
            covs[i][1][0].get<double>(), covs[i][1][1].get<double>();
        model.components.push_back(g);
    }
    return model;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write file: " + path);
    out << content;
}

}  // namespace ewalign
