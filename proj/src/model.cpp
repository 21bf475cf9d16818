#include "l0filter/model.hpp"

#include <cmath>

namespace l0filter {

PairWeights compute_weights(const Matrix& points, double theta) {
    const std::size_t m = points.rows();
    PairWeights pw;
    pw.theta = theta;
    pw.m = m;
    pw.w.resize(m * (m - 1) / 2);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 1; j < (std::ptrdiff_t)m; ++j) {
        double* row = pw.w.data() + j * (j - 1) / 2;
        for (std::ptrdiff_t i = 0; i < j; ++i)
            row[i] = std::exp(-theta * sq_dist_rows(points, i, points, j));
    }
    return pw;
}

double eval_l0_objective(const Matrix& x, const PairWeights& w, double lambda,
                         const Matrix& z) {
    const std::size_t m = x.rows();
    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit += sq_dist_rows(x, i, z, i);
    // Per-row partials summed in fixed order keep the result independent of
    // the thread count.
    std::vector<double> partial(m, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 1; j < (std::ptrdiff_t)m; ++j) {
        double s = 0.0;
        for (std::ptrdiff_t i = 0; i < j; ++i)
            if (sq_dist_rows(z, i, z, j) > 0.0) s += w(i, j);
        partial[j] = s;
    }
    double pen = 0.0;
    for (double p : partial) pen += p;
    return fit + lambda * pen;
}

double eval_smooth_objective(const SmoothProblem& p, const Matrix& z) {
    const Matrix& x = *p.x;
    const std::size_t m = x.rows();
    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit += sq_dist_rows(x, i, z, i);
    std::vector<double> partial(m, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 1; j < (std::ptrdiff_t)m; ++j) {
        double s = 0.0;
        for (std::ptrdiff_t i = 0; i < j; ++i)
            s += (*p.weights)(i, j) * (1.0 - std::exp(-p.alpha * sq_dist_rows(z, i, z, j)));
        partial[j] = s;
    }
    double pen = 0.0;
    for (double v : partial) pen += v;
    return fit + p.lambda * pen;
}

Matrix grad_smooth(const SmoothProblem& p, const Matrix& z) {
    const Matrix& x = *p.x;
    const std::size_t m = x.rows(), n = x.cols();
    const double la = 2.0 * p.lambda * p.alpha;
    Matrix g(m, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
        double* gi = g[i];
        const double* zi = z[i];
        const double* xi = x[i];
        for (std::size_t h = 0; h < n; ++h) gi[h] = 2.0 * (zi[h] - xi[h]);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == (std::size_t)i) continue;
            double c = la * (*p.weights)(i, j) *
                       std::exp(-p.alpha * sq_dist_rows(z, i, z, j));
            const double* zj = z[j];
            for (std::size_t h = 0; h < n; ++h) gi[h] += c * (zi[h] - zj[h]);
        }
    }
    return g;
}

Matrix hessvec_smooth(const SmoothProblem& p, const Matrix& z, const Matrix& d) {
    const Matrix& x = *p.x;
    const std::size_t m = x.rows(), n = x.cols();
    const double la = 2.0 * p.lambda * p.alpha;
    Matrix r(m, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
        double* ri = r[i];
        const double* di = d[i];
        for (std::size_t h = 0; h < n; ++h) ri[h] = 2.0 * di[h];
        const double* zi = z[i];
        for (std::size_t j = 0; j < m; ++j) {
            if (j == (std::size_t)i) continue;
            const double* zj = z[j];
            const double* dj = d[j];
            double u2 = 0.0, ud = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                double u = zi[h] - zj[h];
                u2 += u * u;
                ud += u * (di[h] - dj[h]);
            }
            double c = la * (*p.weights)(i, j) * std::exp(-p.alpha * u2);
            double t = 2.0 * p.alpha * ud;
            for (std::size_t h = 0; h < n; ++h)
                ri[h] += c * ((di[h] - dj[h]) - t * (zi[h] - zj[h]));
        }
    }
    return r;
}

double eval_ridge_objective(const Matrix& x, const PairWeights& w, double lambda,
                            const Matrix& z) {
    const std::size_t m = x.rows();
    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit += sq_dist_rows(x, i, z, i);
    std::vector<double> partial(m, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 1; j < (std::ptrdiff_t)m; ++j) {
        double s = 0.0;
        for (std::ptrdiff_t i = 0; i < j; ++i) s += w(i, j) * sq_dist_rows(z, i, z, j);
        partial[j] = s;
    }
    double pen = 0.0;
    for (double v : partial) pen += v;
    return fit + lambda * pen;
}

Matrix grad_ridge(const Matrix& x, const PairWeights& w, double lambda,
                  const Matrix& z) {
    const std::size_t m = x.rows(), n = x.cols();
    Matrix g(m, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
        double* gi = g[i];
        const double* zi = z[i];
        const double* xi = x[i];
        for (std::size_t h = 0; h < n; ++h) gi[h] = 2.0 * (zi[h] - xi[h]);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == (std::size_t)i) continue;
            double c = 2.0 * lambda * w(i, j);
            const double* zj = z[j];
            for (std::size_t h = 0; h < n; ++h) gi[h] += c * (zi[h] - zj[h]);
        }
    }
    return g;
}

void SmoothEvaluator::set_point(const Matrix& z) {
    z_ = z;
    const Matrix& x = *x_;
    const std::size_t m = x.rows(), n = x.cols();
    coeff_.resize(m * (m - 1) / 2);
    // Pass 1: pair coefficients c_ij = w_ij * exp(-alpha ||z_i - z_j||^2).
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 1; j < (std::ptrdiff_t)m; ++j) {
        double* row = coeff_.data() + j * (j - 1) / 2;
        for (std::ptrdiff_t i = 0; i < j; ++i)
            row[i] = w_->w[pair_index(i, j)] *
                     std::exp(-alpha_ * sq_dist_rows(z_, i, z_, j));
    }
    // Pass 2: objective and gradient from the cached coefficients.
    double fit = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit += sq_dist_rows(x, i, z_, i);
    double pen = 0.0;
    for (std::size_t t = 0; t < coeff_.size(); ++t) pen += w_->w[t] - coeff_[t];
    objective_ = fit + lambda_ * pen;

    grad_ = Matrix(m, n);
    const double la = 2.0 * lambda_ * alpha_;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
        double* gi = grad_[i];
        const double* zi = z_[i];
        const double* xi = x[i];
        for (std::size_t h = 0; h < n; ++h) gi[h] = 2.0 * (zi[h] - xi[h]);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == (std::size_t)i) continue;
            double c = la * (j > (std::size_t)i ? coeff_[pair_index(i, j)]
                                                : coeff_[pair_index(j, i)]);
            const double* zj = z_[j];
            for (std::size_t h = 0; h < n; ++h) gi[h] += c * (zi[h] - zj[h]);
        }
    }
}

double SmoothEvaluator::value_at(const Matrix& z) const {
    SmoothProblem p{x_, w_, lambda_, alpha_};
    return l0filter::eval_smooth_objective(p, z);
}

Matrix SmoothEvaluator::hessvec(const Matrix& d) const {
    const std::size_t m = z_.rows(), n = z_.cols();
    const double la = 2.0 * lambda_ * alpha_;
    Matrix r(m, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
        double* ri = r[i];
        const double* di = d[i];
        const double* zi = z_[i];
        for (std::size_t h = 0; h < n; ++h) ri[h] = 2.0 * di[h];
        for (std::size_t j = 0; j < m; ++j) {
            if (j == (std::size_t)i) continue;
            double c = la * (j > (std::size_t)i ? coeff_[pair_index(i, j)]
                                                : coeff_[pair_index(j, i)]);
            const double* zj = z_[j];
            const double* dj = d[j];
            double ud = 0.0;
            for (std::size_t h = 0; h < n; ++h) ud += (zi[h] - zj[h]) * (di[h] - dj[h]);
            double t = 2.0 * alpha_ * ud;
            for (std::size_t h = 0; h < n; ++h)
                ri[h] += c * ((di[h] - dj[h]) - t * (zi[h] - zj[h]));
        }
    }
    return r;
}

}  // namespace l0filter
