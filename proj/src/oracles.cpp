#include "l0filter/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace l0filter {

std::pair<bool, HullCertificate> hull_membership(const std::vector<double>& point,
                                                 const Matrix& points, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("hull_membership: tol <= 0");
    const std::size_t m = points.rows(), n = points.cols();
    if (point.size() != n)
        throw std::invalid_argument("hull_membership: dimension mismatch");

    // Away-step Frank-Wolfe on f(theta) = ||sum theta_i x_i - p||^2 with
    // exact line search (f is quadratic along any direction).
    std::vector<double> theta(m, 0.0);
    std::vector<double> c(n);  // current combination
    // Start from the single closest vertex.
    std::size_t start = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        double d = 0.0;
        for (std::size_t h = 0; h < n; ++h) {
            double v = points(i, h) - point[h];
            d += v * v;
        }
        if (d < bd) {
            bd = d;
            start = i;
        }
    }
    theta[start] = 1.0;
    for (std::size_t h = 0; h < n; ++h) c[h] = points(start, h);

    auto residual2 = [&]() {
        double s = 0.0;
        for (std::size_t h = 0; h < n; ++h) {
            double v = c[h] - point[h];
            s += v * v;
        }
        return s;
    };

    double f = residual2();
    const double target = 0.01 * tol * tol;
    int stagnant = 0;
    const int max_iters = 200000;
    std::vector<double> delta(n);

    for (int it = 0; it < max_iters && f > target; ++it) {
        // grad_i = 2 x_i . (c - p); only relative order matters.
        std::size_t fw = 0, away = m;
        double fw_val = std::numeric_limits<double>::infinity();
        double away_val = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            double gi = 0.0;
            for (std::size_t h = 0; h < n; ++h) gi += points(i, h) * (c[h] - point[h]);
            if (gi < fw_val) {
                fw_val = gi;
                fw = i;
            }
            if (theta[i] > 0.0 && gi > away_val) {
                away_val = gi;
                away = i;
            }
        }
        // Choose the step with the larger projected decrease.
        double ct = 0.0;
        for (std::size_t h = 0; h < n; ++h) ct += c[h] * (c[h] - point[h]);
        double fw_gap = ct - fw_val;       // -grad . (x_fw - c) / 2
        double away_gap = away_val - ct;   // -grad . (c - x_away) / 2
        bool use_away = away < m && away_gap > fw_gap && theta[away] < 1.0;

        double gamma_max;
        if (use_away) {
            for (std::size_t h = 0; h < n; ++h) delta[h] = c[h] - points(away, h);
            gamma_max = theta[away] / (1.0 - theta[away]);
        } else {
            for (std::size_t h = 0; h < n; ++h) delta[h] = points(fw, h) - c[h];
            gamma_max = 1.0;
        }
        double dd = 0.0, rd = 0.0;
        for (std::size_t h = 0; h < n; ++h) {
            dd += delta[h] * delta[h];
            rd += (c[h] - point[h]) * delta[h];
        }
        if (dd <= 0.0) break;
        double gamma = std::clamp(-rd / dd, 0.0, gamma_max);
        if (gamma <= 0.0) break;  // no descent available

        if (use_away) {
            for (double& t : theta) t *= (1.0 + gamma);
            theta[away] -= gamma;
            if (theta[away] < 1e-16) theta[away] = 0.0;
        } else {
            for (double& t : theta) t *= (1.0 - gamma);
            theta[fw] += gamma;
        }
        for (std::size_t h = 0; h < n; ++h) c[h] += gamma * delta[h];

        double f_new = residual2();
        stagnant = (f - f_new <= 1e-18 * std::max(1.0, f)) ? stagnant + 1 : 0;
        f = f_new;
        if (stagnant > 50) break;
    }

    // Renormalize against drift.
    double s = 0.0;
    for (double t : theta) s += t;
    if (s > 0.0)
        for (double& t : theta) t /= s;

    HullCertificate cert;
    cert.theta = std::move(theta);
    std::vector<double> comb(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (cert.theta[i] > 0.0)
            for (std::size_t h = 0; h < n; ++h) comb[h] += cert.theta[i] * points(i, h);
    double r2 = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        double v = comb[h] - point[h];
        r2 += v * v;
    }
    cert.residual = std::sqrt(r2);
    return {cert.residual <= tol, std::move(cert)};
}

Matrix finite_difference_gradient(const ScalarObjective& objective, const Matrix& z,
                                  double step) {
    if (step <= 0.0) throw std::invalid_argument("finite_difference_gradient: step <= 0");
    Matrix g(z.rows(), z.cols());
    Matrix zp = z;
    for (std::size_t t = 0; t < z.size(); ++t) {
        double orig = zp.data()[t];
        zp.data()[t] = orig + step;
        double fp = objective(zp);
        zp.data()[t] = orig - step;
        double fm = objective(zp);
        zp.data()[t] = orig;
        g.data()[t] = (fp - fm) / (2.0 * step);
    }
    return g;
}

namespace {

void enumerate_rgs(std::vector<int>& a, std::size_t pos, int max_used, int k,
                   const PartitionObjective& objective, Partition& best,
                   double& best_val) {
    const std::size_t m = a.size();
    if (pos == m) {
        if (max_used + 1 != k) return;
        Partition p;
        p.assignment = a;
        p.k = k;
        double v = objective(p);
        if (v < best_val) {
            best_val = v;
            best = p;
        }
        return;
    }
    int limit = std::min(max_used + 1, k - 1);
    for (int c = 0; c <= limit; ++c) {
        a[pos] = c;
        enumerate_rgs(a, pos + 1, std::max(max_used, c), k, objective, best, best_val);
    }
}

}  // namespace

std::pair<Partition, double> exhaustive_partition_search(std::size_t m, int k,
                                                         const PartitionObjective& objective) {
    if (m > 10) throw std::invalid_argument("exhaustive_partition_search: m > 10");
    if (k < 1 || (std::size_t)k > m)
        throw std::invalid_argument("exhaustive_partition_search: k out of range");
    std::vector<int> a(m, 0);
    Partition best;
    double best_val = std::numeric_limits<double>::infinity();
    a[0] = 0;
    enumerate_rgs(a, 1, 0, k, objective, best, best_val);
    return {std::move(best), best_val};
}

bool check_envelope_relations(const Matrix& x, const PairWeights& w, double lambda,
                              const Matrix& z, double alpha, double alpha_prime) {
    if (!(0.0 < alpha && alpha < alpha_prime))
        throw std::invalid_argument("check_envelope_relations: need 0 < alpha < alpha'");
    SmoothProblem lo{&x, &w, lambda, alpha};
    SmoothProblem hi{&x, &w, lambda, alpha_prime};
    double g_lo = eval_smooth_objective(lo, z);
    double g_hi = eval_smooth_objective(hi, z);
    double phi = eval_l0_objective(x, w, lambda, z);
    double slack = 1e-15 * std::fabs(phi);
    return g_lo <= g_hi + slack && g_hi <= phi + slack;
}

}  // namespace l0filter
