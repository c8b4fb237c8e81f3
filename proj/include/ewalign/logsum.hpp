#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace ewalign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_j exp(x_j), safe for -inf entries.
inline double log_sum_exp(const Eigen::Ref<const Vector>& x) {
    const double mx = x.maxCoeff();
    if (!(mx > kNegInf)) return kNegInf;
    return mx + std::log((x.array() - mx).exp().sum());
}

// out_i = log sum_j exp(K(i,j) + v(j)).  K is r x c, v has length c.
inline void lse_rows(const Matrix& K, const Vector& v, Vector& out) {
    const Eigen::Index r = K.rows();
    out.resize(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto row = K.row(i).transpose().array() + v.array();
        const double mx = row.maxCoeff();
        out(i) = (mx > kNegInf) ? mx + std::log((row - mx).exp().sum()) : kNegInf;
    }
}

// out_j = log sum_i exp(K(i,j) + v(i)).
inline void lse_cols(const Matrix& K, const Vector& v, Vector& out) {
    const Eigen::Index c = K.cols();
    out.resize(c);
    for (Eigen::Index j = 0; j < c; ++j) {
        const auto col = K.col(j).array() + v.array();
        const double mx = col.maxCoeff();
        out(j) = (mx > kNegInf) ? mx + std::log((col - mx).exp().sum()) : kNegInf;
    }
}

// Elementwise log of a nonnegative vector; zeros map to -inf.
inline Vector safe_log(const Vector& w) {
    Vector out(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        out(i) = w(i) > 0.0 ? std::log(w(i)) : kNegInf;
    return out;
}

// <a, b> treating 0 * (-inf) as 0.
inline double masked_dot(const Vector& mass, const Vector& logs) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < mass.size(); ++i)
        if (mass(i) > 0.0) s += mass(i) * logs(i);
    return s;
}

}  // namespace ewalign
