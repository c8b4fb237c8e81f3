#pragma once

#include <string>
#include <vector>

#include "ewalign/core.hpp"

namespace ewalign {

// Minimal SVG emitters for the CLI artifacts; dependency free.

struct ScatterSeries {
    Matrix points;        // n x 2
    Vector sizes;         // point masses, scaled to radii
    std::string color;
    std::string name;
};

std::string svg_scatter(const std::vector<ScatterSeries>& series, const std::string& title);

// Heatmap with a viridis-like ramp; by default smaller values are darker
// (the distance-matrix convention).  `invert` flips the ramp.
std::string svg_heatmap(const Matrix& values, const std::string& title, bool invert = false);

// Mass over a chart grid (rows x cols cells), one panel per weight vector.
std::string svg_grid_mass(const std::vector<Vector>& masses, int rows, int cols,
                          const std::vector<std::string>& names, const std::string& title);

struct CurveSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color;
    std::string name;
};

std::string svg_curves(const std::vector<CurveSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

}  // namespace ewalign
