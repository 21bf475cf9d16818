#ifndef L0FILTER_SOLVER_HPP
#define L0FILTER_SOLVER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "l0filter/model.hpp"

namespace l0filter {

struct SolverConfig {
    double alpha_init = 1.0;
    double alpha_max = 1e3;
    double tol_floor = 1e-5;   // eps_t = max(tol_floor, tol_scale / alpha_t)
    double tol_scale = 1e-2;
    int max_outer_iters = 500;  // per alpha stage
    int cg_max_iters = 0;       // 0 -> 10 * m * n
    int nonmonotone_memory = 10;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_halvings = 60;
    double merge_tol_rel = 1e-3;
};

struct StageRecord {
    int t = 0;
    double alpha = 0.0;
    double epsilon = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;
    double objective = 0.0;
    double seconds = 0.0;
};

struct SolveTrace {
    std::vector<StageRecord> stages;
    double total_seconds = 0.0;
};

struct MergeGroups {
    std::vector<int> group;   // group id per sample
    int num_groups = 0;
    Matrix representatives;   // group means of z, num_groups x n
};

// Oracle interface for the truncated-Newton loop. hessvec() is evaluated at
// the last point passed to set_point().
class TnOracle {
public:
    virtual ~TnOracle() = default;
    virtual void set_point(const Matrix& z) = 0;
    virtual double objective() const = 0;
    virtual const Matrix& gradient() const = 0;
    virtual double value_at(const Matrix& z) const = 0;
    virtual Matrix hessvec(const Matrix& d) const = 0;
};

class SmoothTnOracle : public TnOracle {
public:
    explicit SmoothTnOracle(SmoothEvaluator ev) : ev_(std::move(ev)) {}
    SmoothEvaluator& evaluator() { return ev_; }
    void set_point(const Matrix& z) override { ev_.set_point(z); }
    double objective() const override { return ev_.objective(); }
    const Matrix& gradient() const override { return ev_.gradient(); }
    double value_at(const Matrix& z) const override { return ev_.value_at(z); }
    Matrix hessvec(const Matrix& d) const override { return ev_.hessvec(d); }

private:
    SmoothEvaluator ev_;
};

struct TnResult {
    Matrix z;
    int iterations = 0;
    double grad_norm = 0.0;
    double objective = 0.0;
    bool truncated = false;  // hit the outer iteration cap
};

// Minimizes via Newton steps with a CG inner loop on the Hessian-vector
// oracle; CG exits on negative curvature. Nonmonotone Armijo line search
// against the max objective over the last config.nonmonotone_memory iterates.
// Throws on non-finite values or line-search failure.
TnResult truncated_newton_minimize(TnOracle& oracle, const Matrix& z0,
                                   double grad_tol, const SolverConfig& config);

// alpha-continuation solve of the smooth l0 surrogate, warm-starting each
// stage. z0 defaults to x.
std::pair<Matrix, SolveTrace> solve_smooth_l0(const Matrix& x, const PairWeights& w,
                                              double lambda, const SolverConfig& config,
                                              const Matrix* z0 = nullptr);

// Strictly convex quadratic; solved per coordinate column by CG on
// (I + lambda * L) col = x_col with L the weighted graph Laplacian.
Matrix solve_ridge(const Matrix& x, const PairWeights& w, double lambda,
                   double grad_tol = 1e-5);

// Connected components under ||z_i - z_j|| <= tau_rel * diam(X).
MergeGroups merge_centroids(const Matrix& z, const Matrix& points, double tau_rel);

// Number of merge groups produced by solving at a given lambda; the two
// standard instantiations wrap solve_smooth_l0 and solve_ridge.
using CollapseProbe = std::function<int(double lambda)>;

// Doubles lambda from 1 until the probe reports a single group, then bisects
// 10 times. Throws if collapse is not reached by lambda = 1e12.
double find_lambda_max(const CollapseProbe& probe);

CollapseProbe make_l0_collapse_probe(const Matrix& x, const PairWeights& w,
                                     const SolverConfig& config);
CollapseProbe make_ridge_collapse_probe(const Matrix& x, const PairWeights& w,
                                        const SolverConfig& config);

// lambda_1 = 0, then N-1 geometric values from lambda_max * 1e-4 to lambda_max.
std::vector<double> build_lambda_grid(double lambda_max, int n = 150);

// Trace CSV: lambda, t, alpha, epsilon, iterations, grad_norm, objective, seconds.
void append_trace_csv(const std::string& path, double lambda, const SolveTrace& trace,
                      bool write_header);

}  // namespace l0filter

#endif
