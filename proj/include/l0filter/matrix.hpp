#ifndef L0FILTER_MATRIX_HPP
#define L0FILTER_MATRIX_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace l0filter {

// Dense row-major matrix of doubles. Rows are samples, columns features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double* operator[](std::size_t i) { return data_.data() + i * cols_; }
    const double* operator[](std::size_t i) const { return data_.data() + i * cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double sq_dist_rows(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    assert(a.cols() == b.cols());
    double s = 0.0;
    const double* pi = a[i];
    const double* pj = b[j];
    for (std::size_t h = 0; h < a.cols(); ++h) {
        double d = pi[h] - pj[h];
        s += d * d;
    }
    return s;
}

inline double dot(const Matrix& a, const Matrix& b) {
    assert(a.same_shape(b));
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += a.data()[t] * b.data()[t];
    return s;
}

inline double sup_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s = std::max(s, std::fabs(a.data()[t]));
    return s;
}

inline double sup_diff(const Matrix& a, const Matrix& b) {
    assert(a.same_shape(b));
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t)
        s = std::max(s, std::fabs(a.data()[t] - b.data()[t]));
    return s;
}

// y += c * x
inline void axpy(double c, const Matrix& x, Matrix& y) {
    assert(x.same_shape(y));
    for (std::size_t t = 0; t < x.size(); ++t) y.data()[t] += c * x.data()[t];
}

// Packed index of an unordered pair, i < j.
inline std::size_t pair_index(std::size_t i, std::size_t j) {
    assert(i < j);
    return j * (j - 1) / 2 + i;
}

}  // namespace l0filter

#endif
