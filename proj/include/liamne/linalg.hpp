#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace liamne {

// Minimal row-major dense matrix. The model dimensions are tiny (d <= a few
// hundred), so plain loops are all that is needed.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    double* row(std::size_t r) { return a.data() + r * cols; }
    const double* row(std::size_t r) const { return a.data() + r * cols; }

    void fill(double v) { a.assign(a.size(), v); }
};

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// y = M x
inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* mr = m.row(r);
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) s += mr[c] * x[c];
        y[r] = s;
    }
    return y;
}

// y = M^T x
inline std::vector<double> matvec_t(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.rows) throw std::invalid_argument("matvec_t: dimension mismatch");
    std::vector<double> y(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* mr = m.row(r);
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += mr[c] * x[r];
    }
    return y;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Numerically stable softmax over a small vector.
inline std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = logits[0];
    for (double v : logits)
        if (v > mx) mx = v;
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

// -log sigmoid(z) without overflow for large |z|.
inline double log1p_exp(double z) {
    // log(1 + e^z)
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

inline double neg_log_sigmoid(double z) { return log1p_exp(-z); }

// -log(1 - sigmoid(z)) = log(1 + e^z)
inline double neg_log_one_minus_sigmoid(double z) { return log1p_exp(z); }

}  // namespace liamne
