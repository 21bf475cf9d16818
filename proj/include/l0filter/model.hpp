#ifndef L0FILTER_MODEL_HPP
#define L0FILTER_MODEL_HPP

#include <cstddef>
#include <vector>

#include "l0filter/dataset.hpp"
#include "l0filter/matrix.hpp"

namespace l0filter {

// Symmetric nonnegative pair weights, packed upper-triangular (i < j).
struct PairWeights {
    std::vector<double> w;  // length m(m-1)/2
    double theta = 0.1;
    std::size_t m = 0;

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i < j ? w[pair_index(i, j)] : w[pair_index(j, i)];
    }
};

// w_ij = exp(-theta * ||x_i - x_j||^2)
PairWeights compute_weights(const Matrix& points, double theta = 0.1);

struct SmoothProblem {
    const Matrix* x = nullptr;
    const PairWeights* weights = nullptr;
    double lambda = 0.0;
    double alpha = 1.0;
};

// Exact objective: sum_i ||x_i - z_i||^2 + lambda * sum_{i<j} w_ij * s(||z_i - z_j||)
double eval_l0_objective(const Matrix& x, const PairWeights& w, double lambda,
                         const Matrix& z);

// Smooth surrogate: sum_i ||x_i - z_i||^2
//   + lambda * sum_{i<j} w_ij * (1 - exp(-alpha ||z_i - z_j||^2))
double eval_smooth_objective(const SmoothProblem& p, const Matrix& z);
Matrix grad_smooth(const SmoothProblem& p, const Matrix& z);
Matrix hessvec_smooth(const SmoothProblem& p, const Matrix& z, const Matrix& d);

// Ridge: sum_i ||x_i - z_i||^2 + lambda * sum_{i<j} w_ij ||z_i - z_j||^2
double eval_ridge_objective(const Matrix& x, const PairWeights& w, double lambda,
                            const Matrix& z);
Matrix grad_ridge(const Matrix& x, const PairWeights& w, double lambda,
                  const Matrix& z);

// Solver-facing evaluator caching the per-pair exponential coefficients
// c_ij = w_ij * exp(-alpha ||z_i - z_j||^2) at the current point, so that
// Hessian-vector products inside CG cost no exp calls.
class SmoothEvaluator {
public:
    SmoothEvaluator(const Matrix& x, const PairWeights& w, double lambda)
        : x_(&x), w_(&w), lambda_(lambda) {}

    void set_alpha(double alpha) { alpha_ = alpha; }
    double alpha() const { return alpha_; }
    double lambda() const { return lambda_; }

    // Moves to z; computes and caches objective, gradient and pair coefficients.
    void set_point(const Matrix& z);

    double objective() const { return objective_; }
    const Matrix& gradient() const { return grad_; }
    const Matrix& point() const { return z_; }

    // Objective only, no cache update (line search probes).
    double value_at(const Matrix& z) const;

    // H(z) * d at the cached point.
    Matrix hessvec(const Matrix& d) const;

private:
    const Matrix* x_;
    const PairWeights* w_;
    double lambda_;
    double alpha_ = 1.0;
    Matrix z_;
    Matrix grad_;
    double objective_ = 0.0;
    std::vector<double> coeff_;  // packed c_ij at z_
};

// Serial reference implementations, kept for testing the OpenMP kernels and
// for the kernel benchmark.
namespace serial {
PairWeights compute_weights(const Matrix& points, double theta = 0.1);
double eval_smooth_objective(const SmoothProblem& p, const Matrix& z);
Matrix grad_smooth(const SmoothProblem& p, const Matrix& z);
Matrix hessvec_smooth(const SmoothProblem& p, const Matrix& z, const Matrix& d);
double eval_ridge_objective(const Matrix& x, const PairWeights& w, double lambda,
                            const Matrix& z);
Matrix grad_ridge(const Matrix& x, const PairWeights& w, double lambda,
                  const Matrix& z);
}  // namespace serial

}  // namespace l0filter

#endif
