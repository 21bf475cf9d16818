#include "l0filter/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace l0filter {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double euclidean_norm(const Matrix& a) { return std::sqrt(dot(a, a)); }

// Truncated CG on H p = -g. Exits on negative curvature with the current
// iterate, or with the steepest-descent direction if that happens first.
Matrix tn_cg(TnOracle& oracle, const Matrix& g, const SolverConfig& config) {
    const std::size_t mn = g.size();
    int max_iters = config.cg_max_iters > 0 ? config.cg_max_iters
                                            : (int)std::min<std::size_t>(10 * mn, 100000);
    double gnorm = euclidean_norm(g);
    double cut = std::min(0.5, std::sqrt(gnorm)) * gnorm;

    Matrix p(g.rows(), g.cols());
    Matrix r = g;  // r = -g - H p, with p = 0
    for (std::size_t t = 0; t < r.size(); ++t) r.data()[t] = -g.data()[t];
    Matrix d = r;
    double rr = dot(r, r);
    bool have_step = false;

    for (int it = 0; it < max_iters; ++it) {
        Matrix hd = oracle.hessvec(d);
        double dhd = dot(d, hd);
        if (dhd <= 1e-14 * dot(d, d)) {
            // Negative (or vanishing) curvature along d.
            return have_step ? p : d;
        }
        double a = rr / dhd;
        axpy(a, d, p);
        have_step = true;
        axpy(-a, hd, r);
        double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= cut) break;
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t t = 0; t < d.size(); ++t)
            d.data()[t] = r.data()[t] + beta * d.data()[t];
    }
    return p;
}

}  // namespace

TnResult truncated_newton_minimize(TnOracle& oracle, const Matrix& z0,
                                   double grad_tol, const SolverConfig& config) {
    oracle.set_point(z0);
    double f = oracle.objective();
    if (!std::isfinite(f) || !oracle.gradient().all_finite())
        throw std::runtime_error("truncated_newton: non-finite objective or gradient");

    TnResult res;
    res.z = z0;
    res.grad_norm = sup_norm(oracle.gradient());
    res.objective = f;
    if (res.grad_norm <= grad_tol) return res;

    std::deque<double> history{f};
    for (int iter = 1; iter <= config.max_outer_iters; ++iter) {
        const Matrix& g = oracle.gradient();
        Matrix d = tn_cg(oracle, g, config);
        double gd = dot(g, d);
        if (!(gd < 0.0)) {
            for (std::size_t t = 0; t < d.size(); ++t) d.data()[t] = -g.data()[t];
            gd = dot(g, d);
        }

        double fref = *std::max_element(history.begin(), history.end());
        double step = 1.0;
        Matrix z_new = res.z;
        double f_new = 0.0;
        bool accepted = false;
        for (int h = 0; h <= config.max_halvings; ++h) {
            z_new = res.z;
            axpy(step, d, z_new);
            f_new = oracle.value_at(z_new);
            if (std::isfinite(f_new) && f_new <= fref + config.armijo_c * step * gd) {
                accepted = true;
                break;
            }
            step *= config.backtrack;
        }
        if (!accepted)
            throw std::runtime_error("truncated_newton: line search failed");

        res.z = std::move(z_new);
        oracle.set_point(res.z);
        f = oracle.objective();
        if (!std::isfinite(f) || !oracle.gradient().all_finite())
            throw std::runtime_error("truncated_newton: non-finite objective or gradient");
        history.push_back(f);
        while ((int)history.size() > config.nonmonotone_memory) history.pop_front();

        res.iterations = iter;
        res.grad_norm = sup_norm(oracle.gradient());
        res.objective = f;
        if (res.grad_norm <= grad_tol) return res;
    }
    res.truncated = true;
    return res;
}

std::pair<Matrix, SolveTrace> solve_smooth_l0(const Matrix& x, const PairWeights& w,
                                              double lambda, const SolverConfig& config,
                                              const Matrix* z0) {
    SmoothTnOracle oracle{SmoothEvaluator(x, w, lambda)};
    Matrix z = z0 ? *z0 : x;
    SolveTrace trace;
    auto t_total = std::chrono::steady_clock::now();

    double alpha = config.alpha_init;
    for (int t = 1;; ++t) {
        double eps = std::max(config.tol_floor, config.tol_scale / alpha);
        oracle.evaluator().set_alpha(alpha);
        auto t0 = std::chrono::steady_clock::now();
        TnResult res;
        try {
            res = truncated_newton_minimize(oracle, z, eps, config);
        } catch (const std::exception& e) {
            throw std::runtime_error("solve_smooth_l0 at alpha=" + std::to_string(alpha) +
                                     ": " + e.what());
        }
        z = res.z;
        trace.stages.push_back({t, alpha, eps, res.iterations, res.grad_norm,
                                res.objective, seconds_since(t0)});
        if (alpha >= config.alpha_max) break;
        alpha = std::min(config.alpha_max, (1.0 + std::exp(-0.07 * t)) * alpha);
    }
    trace.total_seconds = seconds_since(t_total);
    return {std::move(z), std::move(trace)};
}

Matrix solve_ridge(const Matrix& x, const PairWeights& w, double lambda,
                   double grad_tol) {
    const std::size_t m = x.rows(), n = x.cols();
    Matrix z = x;
    if (lambda == 0.0 || m < 2) return z;

    std::vector<double> deg(m, 0.0);
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            double wij = w.w[pair_index(i, j)];
            deg[i] += wij;
            deg[j] += wij;
        }

    // y = (I + lambda * L) v, L = D - W
    auto matvec = [&](const std::vector<double>& v, std::vector<double>& y) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                if (j != (std::size_t)i) s += w(i, j) * v[j];
            y[i] = v[i] + lambda * (deg[i] * v[i] - s);
        }
    };

    // Gradient of the objective is 2 * ((I + lambda L) z - x), so the target
    // residual sup-norm is grad_tol / 2 per column.
    const double res_tol = grad_tol / 2.0;
    const int max_iters = 40 * (int)m + 200;
    std::vector<double> col(m), r(m), p(m), ap(m);

    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t i = 0; i < m; ++i) col[i] = x(i, h);
        matvec(col, ap);
        double rmax = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            r[i] = x(i, h) - ap[i];
            rmax = std::max(rmax, std::fabs(r[i]));
        }
        p = r;
        double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
        int it = 0;
        while (rmax > res_tol) {
            if (++it > max_iters)
                throw std::runtime_error("solve_ridge: CG iteration budget exhausted");
            matvec(p, ap);
            double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
            double a = rr / pap;
            rmax = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                col[i] += a * p[i];
                r[i] -= a * ap[i];
                rmax = std::max(rmax, std::fabs(r[i]));
            }
            double rr_new = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
            double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
            if (rmax <= res_tol) {
                // Recompute the true residual before accepting.
                matvec(col, ap);
                rmax = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    r[i] = x(i, h) - ap[i];
                    rmax = std::max(rmax, std::fabs(r[i]));
                }
                p = r;
                rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
            }
        }
        for (std::size_t i = 0; i < m; ++i) z(i, h) = col[i];
    }
    return z;
}

MergeGroups merge_centroids(const Matrix& z, const Matrix& points, double tau_rel) {
    if (tau_rel <= 0.0) throw std::invalid_argument("merge_centroids: tau_rel <= 0");
    const std::size_t m = z.rows();
    const double tau = tau_rel * dataset_diameter(points);
    const double tau2 = tau * tau;

    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (sq_dist_rows(z, i, z, j) <= tau2) {
                int ra = find((int)i), rb = find((int)j);
                if (ra != rb) parent[rb] = ra;
            }

    MergeGroups mg;
    mg.group.assign(m, -1);
    std::vector<int> root_to_id;
    for (std::size_t i = 0; i < m; ++i) {
        int r = find((int)i);
        int id = -1;
        for (std::size_t t = 0; t < root_to_id.size(); ++t)
            if (root_to_id[t] == r) { id = (int)t; break; }
        if (id < 0) {
            id = (int)root_to_id.size();
            root_to_id.push_back(r);
        }
        mg.group[i] = id;
    }
    mg.num_groups = (int)root_to_id.size();
    mg.representatives = Matrix(mg.num_groups, z.cols());
    std::vector<int> count(mg.num_groups, 0);
    for (std::size_t i = 0; i < m; ++i) {
        int gid = mg.group[i];
        ++count[gid];
        for (std::size_t h = 0; h < z.cols(); ++h) mg.representatives(gid, h) += z(i, h);
    }
    for (int gidx = 0; gidx < mg.num_groups; ++gidx)
        for (std::size_t h = 0; h < z.cols(); ++h) mg.representatives(gidx, h) /= count[gidx];
    return mg;
}

double find_lambda_max(const CollapseProbe& probe) {
    double lam = 1.0;
    double lo = 0.0;
    while (probe(lam) > 1) {
        lo = lam;
        lam *= 2.0;
        if (lam > 1e12)
            throw std::runtime_error("find_lambda_max: no collapse by lambda = 1e12");
    }
    double hi = lam;
    for (int b = 0; b < 10; ++b) {
        double mid = (lo + hi) / 2.0;
        if (probe(mid) == 1)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

CollapseProbe make_l0_collapse_probe(const Matrix& x, const PairWeights& w,
                                     const SolverConfig& config) {
    return [&x, &w, config](double lambda) {
        auto [z, trace] = solve_smooth_l0(x, w, lambda, config);
        return merge_centroids(z, x, config.merge_tol_rel).num_groups;
    };
}

CollapseProbe make_ridge_collapse_probe(const Matrix& x, const PairWeights& w,
                                        const SolverConfig& config) {
    return [&x, &w, config](double lambda) {
        Matrix z = solve_ridge(x, w, lambda, config.tol_floor);
        return merge_centroids(z, x, config.merge_tol_rel).num_groups;
    };
}

std::vector<double> build_lambda_grid(double lambda_max, int n) {
    if (n < 2 || lambda_max <= 0.0)
        throw std::invalid_argument("build_lambda_grid: need n >= 2, lambda_max > 0");
    std::vector<double> grid(n);
    grid[0] = 0.0;
    const double lo = lambda_max * 1e-4;
    if (n == 2) {
        grid[1] = lambda_max;
        return grid;
    }
    const double ratio = std::pow(lambda_max / lo, 1.0 / (n - 2));
    for (int i = 1; i < n; ++i) grid[i] = lo * std::pow(ratio, i - 1);
    grid[n - 1] = lambda_max;  // exact endpoint
    return grid;
}

void append_trace_csv(const std::string& path, double lambda, const SolveTrace& trace,
                      bool write_header) {
    std::FILE* f = std::fopen(path.c_str(), write_header ? "w" : "a");
    if (!f) throw std::runtime_error("append_trace_csv: cannot open " + path);
    if (write_header)
        std::fprintf(f, "lambda,t,alpha,epsilon,iterations,grad_norm,objective,seconds\n");
    for (const auto& s : trace.stages)
        std::fprintf(f, "%.17g,%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g\n", lambda, s.t,
                     s.alpha, s.epsilon, s.iterations, s.grad_norm, s.objective,
                     s.seconds);
    std::fclose(f);
}

}  // namespace l0filter
