#include "ewalign/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ewalign {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 640;
constexpr int kMargin = 56;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Compact viridis approximation over t in [0,1].
std::string viridis(double t) {
    t = std::clamp(t, 0.0, 1.0);
    struct Anchor { double t, r, g, b; };
    static const Anchor anchors[] = {
        {0.00, 68, 1, 84},   {0.25, 59, 82, 139},  {0.50, 33, 145, 140},
        {0.75, 94, 201, 98}, {1.00, 253, 231, 37},
    };
    const Anchor* lo = &anchors[0];
    const Anchor* hi = &anchors[4];
    for (int i = 0; i < 4; ++i)
        if (t >= anchors[i].t && t <= anchors[i + 1].t) {
            lo = &anchors[i];
            hi = &anchors[i + 1];
            break;
        }
    const double f = (hi->t > lo->t) ? (t - lo->t) / (hi->t - lo->t) : 0.0;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(lo->r + f * (hi->r - lo->r))),
                  static_cast<int>(std::lround(lo->g + f * (hi->g - lo->g))),
                  static_cast<int>(std::lround(lo->b + f * (hi->b - lo->b))));
    return buf;
}

std::string header(const std::string& title, int width = kWidth, int height = kHeight) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"16\">"
       << title << "</text>\n";
    return os.str();
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double map(double v, double out_lo, double out_hi) const {
        const double span = (hi > lo) ? (hi - lo) : 1.0;
        return out_lo + (v - lo) / span * (out_hi - out_lo);
    }
};

}  // namespace

std::string svg_scatter(const std::vector<ScatterSeries>& series, const std::string& title) {
    Range rx, ry;
    bool any = false;
    for (const auto& s : series)
        for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
            if (!any) {
                rx.lo = rx.hi = s.points(i, 0);
                ry.lo = ry.hi = s.points(i, 1);
                any = true;
            }
            rx.expand(s.points(i, 0));
            ry.expand(s.points(i, 1));
        }

    std::ostringstream os;
    os << header(title);
    double legend_y = 44.0;
    for (const auto& s : series) {
        const double max_mass = s.sizes.size() > 0 ? std::max(s.sizes.maxCoeff(), 1e-300) : 1.0;
        for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
            const double px = rx.map(s.points(i, 0), kMargin, kWidth - kMargin);
            const double py = ry.map(s.points(i, 1), kHeight - kMargin, kMargin);
            const double mass = s.sizes.size() > 0 ? s.sizes(i) : 1.0;
            const double r = 1.5 + 6.0 * std::sqrt(std::max(0.0, mass) / max_mass);
            os << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py) << "\" r=\"" << fmt(r)
               << "\" fill=\"" << s.color << "\" fill-opacity=\"0.55\"/>\n";
        }
        os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << fmt(legend_y)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\" fill=\""
           << s.color << "\">" << s.name << "</text>\n";
        legend_y += 18.0;
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_heatmap(const Matrix& values, const std::string& title, bool invert) {
    const Eigen::Index n = values.rows(), m = values.cols();
    const double lo = values.minCoeff(), hi = values.maxCoeff();
    const double span = (hi > lo) ? hi - lo : 1.0;
    const double cw = static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(m);
    const double ch = static_cast<double>(kHeight - 2 * kMargin) / static_cast<double>(n);

    std::ostringstream os;
    os << header(title);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            double t = (values(i, j) - lo) / span;
            if (invert) t = 1.0 - t;  // smaller values darker when not inverted
            os << "<rect x=\"" << fmt(kMargin + j * cw) << "\" y=\"" << fmt(kMargin + i * ch)
               << "\" width=\"" << fmt(cw + 0.5) << "\" height=\"" << fmt(ch + 0.5)
               << "\" fill=\"" << viridis(t) << "\"/>\n";
        }
    os << "</svg>\n";
    return os.str();
}

std::string svg_grid_mass(const std::vector<Vector>& masses, int rows, int cols,
                          const std::vector<std::string>& names, const std::string& title) {
    const int panels = static_cast<int>(masses.size());
    const int width = panels * kWidth / 2 + kMargin;
    const int height = kHeight / 2 + 2 * kMargin;
    std::ostringstream os;
    os << header(title, width, height);
    for (int p = 0; p < panels; ++p) {
        const Vector& w = masses[static_cast<size_t>(p)];
        const double hi = std::max(w.maxCoeff(), 1e-300);
        const double x0 = kMargin / 2.0 + p * (kWidth / 2.0);
        const double y0 = kMargin + 8.0;
        const double cw = (kWidth / 2.0 - kMargin) / cols;
        const double ch = (kHeight / 2.0 - kMargin / 2.0) / rows;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const Eigen::Index idx = static_cast<Eigen::Index>(r) * cols + c;
                const double t = idx < w.size() ? w(idx) / hi : 0.0;
                os << "<rect x=\"" << fmt(x0 + c * cw) << "\" y=\"" << fmt(y0 + r * ch)
                   << "\" width=\"" << fmt(cw + 0.5) << "\" height=\"" << fmt(ch + 0.5)
                   << "\" fill=\"" << viridis(t) << "\"/>\n";
            }
        if (p < static_cast<int>(names.size()))
            os << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 - 8.0)
               << "\" font-family=\"sans-serif\" font-size=\"13\">" << names[static_cast<size_t>(p)]
               << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_curves(const std::vector<CurveSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
    Range rx, ry;
    bool any = false;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                rx.lo = rx.hi = s.x[i];
                ry.lo = ry.hi = s.y[i];
                any = true;
            }
            rx.expand(s.x[i]);
            ry.expand(s.y[i]);
        }

    std::ostringstream os;
    os << header(title);
    os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
       << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kMargin
       << "\" y2=\"" << kMargin << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
       << "</text>\n"
       << "<text x=\"16\" y=\"" << kHeight / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
       << kHeight / 2 << ")\">" << y_label << "</text>\n";

    // axis end labels
    os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(rx.lo) << "</text>\n"
       << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(rx.hi)
       << "</text>\n"
       << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ry.hi)
       << "</text>\n"
       << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ry.lo)
       << "</text>\n";

    double legend_y = 44.0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            os << fmt(rx.map(s.x[i], kMargin, kWidth - kMargin)) << ','
               << fmt(ry.map(s.y[i], kHeight - kMargin, kMargin)) << ' ';
        }
        os << "\"/>\n";
        for (size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx=\"" << fmt(rx.map(s.x[i], kMargin, kWidth - kMargin)) << "\" cy=\""
               << fmt(ry.map(s.y[i], kHeight - kMargin, kMargin)) << "\" r=\"3\" fill=\""
               << s.color << "\"/>\n";
        os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << fmt(legend_y)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\" fill=\""
           << s.color << "\">" << s.name << "</text>\n";
        legend_y += 18.0;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace ewalign
