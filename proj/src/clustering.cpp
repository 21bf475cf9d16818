#include "l0filter/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "l0filter/rng.hpp"

namespace l0filter {

double gaussian_kernel(const double* x, const double* y, std::size_t n, double gamma) {
    double s = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        double d = x[h] - y[h];
        s += d * d;
    }
    return std::exp(-gamma * s);
}

double gaussian_kernel(const std::vector<double>& x, const std::vector<double>& y,
                       double gamma) {
    return gaussian_kernel(x.data(), y.data(), x.size(), gamma);
}

double kernel_distance(const double* x, const double* y, std::size_t n,
                       const KernelSpec& kernel) {
    return 2.0 * (1.0 - gaussian_kernel(x, y, n, kernel.gamma));
}

double kernel_distance(const std::vector<double>& x, const std::vector<double>& y,
                       const KernelSpec& kernel) {
    return kernel_distance(x.data(), y.data(), x.size(), kernel);
}

Matrix kernel_matrix(const Matrix& points, const KernelSpec& kernel) {
    const std::size_t m = points.rows();
    Matrix k(m, m);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)m; ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            double v = gaussian_kernel(points[i], points[j], points.cols(), kernel.gamma);
            k(i, j) = v;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) k(i, j) = k(j, i);
    return k;
}

namespace {

void check_k(int k, std::size_t m, const char* who) {
    if (k < 1 || (std::size_t)k > m)
        throw std::invalid_argument(std::string(who) + ": k out of range");
}

// Relabel so that cluster ids are contiguous and every id occurs.
void compact_labels(Partition& p) {
    std::vector<int> map(p.k, -1);
    int next = 0;
    for (int& a : p.assignment) {
        if (map[a] < 0) map[a] = next++;
        a = map[a];
    }
    p.k = next;
}

}  // namespace

Partition single_linkage(const Matrix& points, int k) {
    const std::size_t m = points.rows();
    check_k(k, m, "single_linkage");

    Matrix dist(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            dist(i, j) = dist(j, i) = sq_dist_rows(points, i, points, j);

    std::vector<bool> alive(m, true);
    std::vector<int> cluster(m);
    std::iota(cluster.begin(), cluster.end(), 0);

    for (std::size_t merges = 0; merges < m - (std::size_t)k; ++merges) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < m; ++j) {
                if (!alive[j]) continue;
                if (dist(i, j) < best) {
                    best = dist(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        // Merge bj into bi (single linkage: minimum distance update).
        alive[bj] = false;
        for (std::size_t c = 0; c < m; ++c) {
            if (!alive[c] || c == bi) continue;
            double v = std::min(dist(bi, c), dist(bj, c));
            dist(bi, c) = dist(c, bi) = v;
        }
        for (std::size_t p = 0; p < m; ++p)
            if (cluster[p] == (int)bj) cluster[p] = (int)bi;
    }

    Partition part;
    part.assignment = std::move(cluster);
    part.k = (int)m;
    compact_labels(part);
    return part;
}

namespace {

// Sample k distinct indices in [0, m).
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t m, int k) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < k; ++t) {
        std::size_t j = t + rng.below(m - t);
        std::swap(idx[t], idx[j]);
    }
    idx.resize(k);
    return idx;
}

struct LloydOutcome {
    std::vector<int> assign;
    Matrix centroids;
    double objective = 0.0;
};

LloydOutcome lloyd_once(const Matrix& x, int k, Rng& rng) {
    const std::size_t m = x.rows(), n = x.cols();
    Matrix c(k, n);
    auto seeds = sample_distinct(rng, m, k);
    for (int t = 0; t < k; ++t)
        for (std::size_t h = 0; h < n; ++h) c(t, h) = x(seeds[t], h);

    std::vector<int> assign(m, -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            int best = 0;
            double bd = sq_dist_rows(x, i, c, 0);
            for (int t = 1; t < k; ++t) {
                double d = sq_dist_rows(x, i, c, t);
                if (d < bd) {
                    bd = d;
                    best = t;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        // Empty-cluster repair: hand over the point farthest from its centroid.
        std::vector<int> count(k, 0);
        for (int a : assign) ++count[a];
        for (int t = 0; t < k; ++t) {
            if (count[t] > 0) continue;
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (count[assign[i]] <= 1) continue;
                double d = sq_dist_rows(x, i, c, assign[i]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            --count[assign[far]];
            assign[far] = t;
            ++count[t];
            changed = true;
        }
        c.fill(0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t h = 0; h < n; ++h) c(assign[i], h) += x(i, h);
        for (int t = 0; t < k; ++t)
            for (std::size_t h = 0; h < n; ++h) c(t, h) /= count[t];
        if (!changed) break;
    }

    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) obj += sq_dist_rows(x, i, c, assign[i]);
    return {std::move(assign), std::move(c), obj};
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed) {
    check_k(k, points.rows(), "kmeans");
    if (restarts < 1) throw std::invalid_argument("kmeans: restarts < 1");
    KMeansResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, r));
        LloydOutcome out = lloyd_once(points, k, rng);
        if (out.objective < best.objective) {
            best.objective = out.objective;
            best.centroids = std::move(out.centroids);
            best.partition.assignment = std::move(out.assign);
            best.partition.k = k;
        }
    }
    compact_labels(best.partition);
    return best;
}

namespace {

struct KkmOutcome {
    std::vector<int> assign;
    double objective = 0.0;
};

KkmOutcome kernel_kmeans_once(const Matrix& gram, int k, Rng& rng) {
    const std::size_t m = gram.rows();
    std::vector<int> assign(m);
    // Random assignments; the first k draws pin one point per cluster so no
    // cluster starts empty.
    auto seeds = sample_distinct(rng, m, k);
    for (std::size_t i = 0; i < m; ++i) assign[i] = (int)rng.below(k);
    for (int t = 0; t < k; ++t) assign[seeds[t]] = t;

    std::vector<int> count(k);
    std::vector<double> self(k);          // sum over cluster of all pair kernels
    std::vector<double> cross(m);         // per point, sum of kernels to one cluster
    std::vector<double> point_cost(m);

    auto cluster_sums = [&]() {
        std::fill(count.begin(), count.end(), 0);
        std::fill(self.begin(), self.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) ++count[assign[i]];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (assign[i] == assign[j]) self[assign[i]] += gram(i, j);
    };

    for (int iter = 0; iter < 300; ++iter) {
        cluster_sums();
        bool changed = false;
        std::vector<int> next(m);
        for (std::size_t i = 0; i < m; ++i) {
            int best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (int t = 0; t < k; ++t) {
                double s = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    if (assign[j] == t) s += gram(i, j);
                double d = gram(i, i) - 2.0 * s / count[t] +
                           self[t] / ((double)count[t] * count[t]);
                if (d < bd) {
                    bd = d;
                    best = t;
                }
            }
            next[i] = best;
            point_cost[i] = bd;
            if (best != assign[i]) changed = true;
        }
        assign = next;
        // Empty-cluster repair.
        std::fill(count.begin(), count.end(), 0);
        for (int a : assign) ++count[a];
        for (int t = 0; t < k; ++t) {
            if (count[t] > 0) continue;
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (count[assign[i]] <= 1) continue;
                if (point_cost[i] > fd) {
                    fd = point_cost[i];
                    far = i;
                }
            }
            --count[assign[far]];
            assign[far] = t;
            ++count[t];
            changed = true;
        }
        if (!changed) break;
    }

    cluster_sums();
    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        int t = assign[i];
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (assign[j] == t) s += gram(i, j);
        obj += gram(i, i) - 2.0 * s / count[t] + self[t] / ((double)count[t] * count[t]);
    }
    return {std::move(assign), obj};
}

}  // namespace

KernelKMeansResult kernel_kmeans_on_matrix(const Matrix& gram, int k, int restarts,
                                           std::uint64_t seed) {
    check_k(k, gram.rows(), "kernel_kmeans");
    if (restarts < 1) throw std::invalid_argument("kernel_kmeans: restarts < 1");
    KernelKMeansResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, r));
        KkmOutcome out = kernel_kmeans_once(gram, k, rng);
        if (out.objective < best.objective) {
            best.objective = out.objective;
            best.partition.assignment = std::move(out.assign);
            best.partition.k = k;
        }
    }
    compact_labels(best.partition);
    return best;
}

KernelKMeansResult kernel_kmeans(const Matrix& points, int k, const KernelSpec& kernel,
                                 int restarts, std::uint64_t seed) {
    Matrix gram = kernel_matrix(points, kernel);
    return kernel_kmeans_on_matrix(gram, k, restarts, seed);
}

namespace {

// Cholesky factorization A = L L^T in place of a copy; returns false if A is
// not positive definite.
bool cholesky(const Matrix& a, Matrix& l) {
    const std::size_t n = a.rows();
    l = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
            if (i == j) {
                if (s <= 0.0) return false;
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return true;
}

struct GaussianComponent {
    std::vector<double> mean;
    Matrix chol;       // lower factor of covariance
    double log_norm;   // -0.5 * (n log 2pi + log det cov)
};

GaussianComponent make_component(const std::vector<double>& mean, Matrix cov) {
    const std::size_t n = mean.size();
    Matrix l;
    double jitter = 1e-6;
    while (!cholesky(cov, l)) {
        for (std::size_t i = 0; i < n; ++i) cov(i, i) += jitter;
        jitter *= 10.0;
        if (jitter > 1e6)
            throw std::runtime_error("em_gaussian_mixture: covariance not repairable");
    }
    double logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
    GaussianComponent g;
    g.mean = mean;
    g.chol = std::move(l);
    g.log_norm = -0.5 * ((double)n * std::log(2.0 * M_PI) + logdet);
    return g;
}

double log_density(const GaussianComponent& g, const double* x) {
    const std::size_t n = g.mean.size();
    // Solve L y = x - mean, then quadratic form = ||y||^2.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i] - g.mean[i];
        for (std::size_t t = 0; t < i; ++t) s -= g.chol(i, t) * y[t];
        y[i] = s / g.chol(i, i);
    }
    double q = 0.0;
    for (double v : y) q += v * v;
    return g.log_norm - 0.5 * q;
}

Matrix sample_covariance(const Matrix& x) {
    const std::size_t m = x.rows(), n = x.cols();
    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t h = 0; h < n; ++h) mean[h] += x(i, h);
    for (double& v : mean) v /= (double)m;
    Matrix cov(n, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                cov(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
    for (std::size_t t = 0; t < cov.size(); ++t) cov.data()[t] /= (double)m;
    return cov;
}

struct EmOutcome {
    std::vector<int> assign;
    GaussianMixture mixture;
    double ll = -std::numeric_limits<double>::infinity();
    std::vector<double> ll_history;
};

EmOutcome em_once(const Matrix& x, int k, Rng& rng) {
    const std::size_t m = x.rows(), n = x.cols();
    GaussianMixture mix;
    mix.weights.assign(k, 1.0 / k);
    mix.means = Matrix(k, n);
    auto seeds = sample_distinct(rng, m, k);
    for (int t = 0; t < k; ++t)
        for (std::size_t h = 0; h < n; ++h) mix.means(t, h) = x(seeds[t], h);
    Matrix global_cov = sample_covariance(x);
    mix.covariances.assign(k, global_cov);

    std::vector<GaussianComponent> comps(k);
    Matrix resp(m, k);
    EmOutcome out;
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 500; ++iter) {
        for (int t = 0; t < k; ++t) {
            std::vector<double> mu(n);
            for (std::size_t h = 0; h < n; ++h) mu[h] = mix.means(t, h);
            comps[t] = make_component(mu, mix.covariances[t]);
        }
        // E step with log-sum-exp.
        double ll = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> lp(k);
            double mx = -std::numeric_limits<double>::infinity();
            for (int t = 0; t < k; ++t) {
                lp[t] = std::log(mix.weights[t]) + log_density(comps[t], x[i]);
                mx = std::max(mx, lp[t]);
            }
            double s = 0.0;
            for (int t = 0; t < k; ++t) s += std::exp(lp[t] - mx);
            double lse = mx + std::log(s);
            ll += lse;
            for (int t = 0; t < k; ++t) resp(i, t) = std::exp(lp[t] - lse);
        }
        out.ll_history.push_back(ll);
        if (std::fabs(ll - prev_ll) < 1e-8) {
            prev_ll = ll;
            break;
        }
        prev_ll = ll;
        // M step.
        for (int t = 0; t < k; ++t) {
            double nk = 0.0;
            for (std::size_t i = 0; i < m; ++i) nk += resp(i, t);
            nk = std::max(nk, 1e-300);
            mix.weights[t] = nk / (double)m;
            for (std::size_t h = 0; h < n; ++h) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += resp(i, t) * x(i, h);
                mix.means(t, h) = s / nk;
            }
            Matrix cov(n, n);
            for (std::size_t i = 0; i < m; ++i) {
                double w = resp(i, t);
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        cov(a, b) += w * (x(i, a) - mix.means(t, a)) *
                                     (x(i, b) - mix.means(t, b));
            }
            for (std::size_t idx = 0; idx < cov.size(); ++idx) cov.data()[idx] /= nk;
            mix.covariances[t] = std::move(cov);
        }
    }

    out.ll = prev_ll;
    out.mixture = std::move(mix);
    out.assign.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        int best = 0;
        for (int t = 1; t < k; ++t)
            if (resp(i, t) > resp(i, best)) best = t;
        out.assign[i] = best;
    }
    // Hard partition repair: an empty cluster takes its most responsible point.
    std::vector<int> count(k, 0);
    for (int a : out.assign) ++count[a];
    for (int t = 0; t < k; ++t) {
        if (count[t] > 0) continue;
        std::size_t best_i = 0;
        double br = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (count[out.assign[i]] <= 1) continue;
            if (resp(i, t) > br) {
                br = resp(i, t);
                best_i = i;
            }
        }
        --count[out.assign[best_i]];
        out.assign[best_i] = t;
        ++count[t];
    }
    return out;
}

}  // namespace

EmResult em_gaussian_mixture(const Matrix& points, int k, int restarts,
                             std::uint64_t seed) {
    check_k(k, points.rows(), "em_gaussian_mixture");
    if (restarts < 1) throw std::invalid_argument("em_gaussian_mixture: restarts < 1");
    if (k > 1) {
        bool all_same = true;
        for (std::size_t i = 1; i < points.rows() && all_same; ++i)
            if (sq_dist_rows(points, 0, points, i) > 0.0) all_same = false;
        if (all_same)
            throw std::invalid_argument("em_gaussian_mixture: identical points, k > 1");
    }
    EmResult best;
    best.log_likelihood = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, r));
        EmOutcome out = em_once(points, k, rng);
        if (out.ll > best.log_likelihood) {
            best.log_likelihood = out.ll;
            best.partition.assignment = std::move(out.assign);
            best.partition.k = k;
            best.mixture = std::move(out.mixture);
            best.ll_history = std::move(out.ll_history);
        }
    }
    compact_labels(best.partition);
    return best;
}

}  // namespace l0filter
