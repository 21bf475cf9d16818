// Serial reference implementations of the pair-loop kernels. Each pair term
// is computed once and its contribution scattered to both blocks. The OpenMP
// kernels in model.cpp are tested and benchmarked against these.
#include <cmath>

#include "l0filter/model.hpp"

namespace l0filter::serial {

PairWeights compute_weights(const Matrix& points, double theta) {
    const std::size_t m = points.rows();
    PairWeights pw;
    pw.theta = theta;
    pw.m = m;
    pw.w.reserve(m * (m - 1) / 2);
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i)
            pw.w.push_back(std::exp(-theta * sq_dist_rows(points, i, points, j)));
    return pw;
}

double eval_smooth_objective(const SmoothProblem& p, const Matrix& z) {
    const Matrix& x = *p.x;
    const std::size_t m = x.rows();
    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit += sq_dist_rows(x, i, z, i);
    double pen = 0.0;
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i)
            pen += (*p.weights)(i, j) *
                   (1.0 - std::exp(-p.alpha * sq_dist_rows(z, i, z, j)));
    return fit + p.lambda * pen;
}

Matrix grad_smooth(const SmoothProblem& p, const Matrix& z) {
    const Matrix& x = *p.x;
    const std::size_t m = x.rows(), n = x.cols();
    const double la = 2.0 * p.lambda * p.alpha;
    Matrix g(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t h = 0; h < n; ++h) g(i, h) = 2.0 * (z(i, h) - x(i, h));
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            double c = la * (*p.weights)(i, j) *
                       std::exp(-p.alpha * sq_dist_rows(z, i, z, j));
            for (std::size_t h = 0; h < n; ++h) {
                double u = z(i, h) - z(j, h);
                g(i, h) += c * u;
                g(j, h) -= c * u;
            }
        }
    return g;
}

Matrix hessvec_smooth(const SmoothProblem& p, const Matrix& z, const Matrix& d) {
    const Matrix& x = *p.x;
    const std::size_t m = x.rows(), n = x.cols();
    const double la = 2.0 * p.lambda * p.alpha;
    Matrix r(m, n);
    for (std::size_t t = 0; t < r.size(); ++t) r.data()[t] = 2.0 * d.data()[t];
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            double u2 = 0.0, ud = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                double u = z(i, h) - z(j, h);
                u2 += u * u;
                ud += u * (d(i, h) - d(j, h));
            }
            double c = la * (*p.weights)(i, j) * std::exp(-p.alpha * u2);
            double t2 = 2.0 * p.alpha * ud;
            for (std::size_t h = 0; h < n; ++h) {
                double v = c * ((d(i, h) - d(j, h)) - t2 * (z(i, h) - z(j, h)));
                r(i, h) += v;
                r(j, h) -= v;
            }
        }
    return r;
}

double eval_ridge_objective(const Matrix& x, const PairWeights& w, double lambda,
                            const Matrix& z) {
    const std::size_t m = x.rows();
    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit += sq_dist_rows(x, i, z, i);
    double pen = 0.0;
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i) pen += w(i, j) * sq_dist_rows(z, i, z, j);
    return fit + lambda * pen;
}

Matrix grad_ridge(const Matrix& x, const PairWeights& w, double lambda,
                  const Matrix& z) {
    const std::size_t m = x.rows(), n = x.cols();
    Matrix g(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t h = 0; h < n; ++h) g(i, h) = 2.0 * (z(i, h) - x(i, h));
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            double c = 2.0 * lambda * w(i, j);
            for (std::size_t h = 0; h < n; ++h) {
                double u = z(i, h) - z(j, h);
                g(i, h) += c * u;
                g(j, h) -= c * u;
            }
        }
    return g;
}

}  // namespace l0filter::serial
