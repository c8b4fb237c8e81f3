#pragma once

#include <array>
#include <string>
#include <vector>

#include "ewalign/core.hpp"
#include "ewalign/spaces.hpp"

namespace ewalign {

// Plain comma-separated 64-bit decimal floats, row-major.  A non-numeric
// first line is treated as an optional header and skipped.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);

Vector read_csv_vector(const std::string& path);
void write_csv_vector(const std::string& path, const Vector& v);

std::vector<int> read_labels_csv(const std::string& path);

struct OffMesh {
    Matrix vertices;                        // n x 3
    std::vector<std::array<int, 3>> faces;  // triangulated
};

// ASCII OFF: optional "OFF" line, counts line, vertex lines, face lines.
// Polygon faces are fan-triangulated.
OffMesh read_off_mesh(const std::string& path);

struct GmmModel {
    std::vector<double> weights;
    std::vector<Gaussian2> components;
};

// JSON object with "weights", "means" and "covariances" arrays.
GmmModel read_gmm_json(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ewalign
