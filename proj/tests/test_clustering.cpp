#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "l0filter/clustering.hpp"
#include "l0filter/dataset.hpp"
#include "l0filter/evaluation.hpp"
#include "l0filter/oracles.hpp"
#include "test_util.hpp"

using namespace l0filter;
using testutil::random_matrix;

namespace {

// Partitions agree up to a relabeling of cluster ids.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

double kmeans_cost(const Matrix& x, const Partition& p) {
    const std::size_t n = x.cols();
    Matrix c(p.k, n);
    std::vector<int> count(p.k, 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        ++count[p.assignment[i]];
        for (std::size_t h = 0; h < n; ++h) c(p.assignment[i], h) += x(i, h);
    }
    for (int t = 0; t < p.k; ++t)
        for (std::size_t h = 0; h < n; ++h) c(t, h) /= count[t];
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        s += sq_dist_rows(x, i, c, p.assignment[i]);
    return s;
}

// Kernel k-means cost sum_i ||phi(x_i) - mean_phi(cluster_i)||^2 from the
// gram matrix.
double kkm_cost(const Matrix& gram, const Partition& p) {
    std::vector<int> count(p.k, 0);
    std::vector<double> self(p.k, 0.0);
    for (int a : p.assignment) ++count[a];
    for (std::size_t i = 0; i < gram.rows(); ++i)
        for (std::size_t j = 0; j < gram.rows(); ++j)
            if (p.assignment[i] == p.assignment[j]) self[p.assignment[i]] += gram(i, j);
    double s = 0.0;
    for (std::size_t i = 0; i < gram.rows(); ++i) {
        int t = p.assignment[i];
        double cross = 0.0;
        for (std::size_t j = 0; j < gram.rows(); ++j)
            if (p.assignment[j] == t) cross += gram(i, j);
        s += gram(i, i) - 2.0 * cross / count[t] + self[t] / ((double)count[t] * count[t]);
    }
    return s;
}

}  // namespace

TEST_CASE("gaussian kernel and kernel distance values") {
    std::vector<double> a{0.0, 0.0}, b{1.0, 2.0};
    CHECK(gaussian_kernel(a, a, 0.1) == 1.0);
    CHECK(gaussian_kernel(a, b, 0.1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    KernelSpec ks{0.1};
    CHECK(kernel_distance(a, a, ks) == 0.0);
    CHECK(kernel_distance(a, b, ks) ==
          doctest::Approx(2.0 * (1.0 - std::exp(-0.5))).epsilon(1e-15));
    // approaches the bound 2 from below
    std::vector<double> far{10.0, 0.0};
    CHECK(kernel_distance(a, far, ks) < 2.0);
    CHECK(kernel_distance(a, far, ks) > 1.999);
}

TEST_CASE("kernel_matrix is symmetric with unit diagonal") {
    Rng rng(3);
    Matrix x = random_matrix(rng, 12, 3);
    Matrix k = kernel_matrix(x, KernelSpec{0.1});
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(k(i, i) == 1.0);
        for (std::size_t j = 0; j < 12; ++j) CHECK(k(i, j) == k(j, i));
    }
}

TEST_CASE("single linkage on collinear points") {
    // 0, 1, 2.5, 3.5: nearest pairs merge first, cut at k=2 splits {0,1} from
    // {2.5, 3.5}.
    Matrix x(4, 1);
    x(0, 0) = 0.0;
    x(1, 0) = 1.0;
    x(2, 0) = 2.5;
    x(3, 0) = 3.5;
    Partition p = single_linkage(x, 2);
    CHECK(p.k == 2);
    CHECK(p.assignment[0] == p.assignment[1]);
    CHECK(p.assignment[2] == p.assignment[3]);
    CHECK(p.assignment[0] != p.assignment[2]);

    CHECK(single_linkage(x, 1).k == 1);
    Partition p4 = single_linkage(x, 4);
    CHECK(p4.k == 4);
    CHECK_THROWS(single_linkage(x, 5));
    CHECK_THROWS(single_linkage(x, 0));
}

TEST_CASE("single linkage chains through dense bridges") {
    // Two tight pairs joined by a chain of stepping stones closer than the
    // pair gap: single linkage follows the chain.
    Matrix x(6, 1);
    double pos[6] = {0.0, 0.3, 1.0, 1.7, 2.0, 5.0};
    for (int i = 0; i < 6; ++i) x(i, 0) = pos[i];
    Partition p = single_linkage(x, 2);
    for (int i = 1; i < 5; ++i) CHECK(p.assignment[i] == p.assignment[0]);
    CHECK(p.assignment[5] != p.assignment[0]);
}

TEST_CASE("kmeans edge cases") {
    Rng rng(5);
    Matrix x = random_matrix(rng, 9, 2);
    KMeansResult r1 = kmeans(x, 1, 4, 11);
    CHECK(r1.partition.k == 1);
    for (int a : r1.partition.assignment) CHECK(a == 0);
    std::vector<double> mean(2, 0.0);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t h = 0; h < 2; ++h) mean[h] += x(i, h) / 9.0;
    CHECK(std::fabs(r1.centroids(0, 0) - mean[0]) <= 1e-12);
    CHECK(std::fabs(r1.centroids(0, 1) - mean[1]) <= 1e-12);

    KMeansResult rm = kmeans(x, 9, 4, 11);
    CHECK(rm.partition.k == 9);
    CHECK(rm.objective == doctest::Approx(0.0));
}

TEST_CASE("kmeans finds the exhaustive optimum on small instances") {
    int hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(100 + s);
        Matrix x = random_matrix(rng, 7, 2);
        KMeansResult r = kmeans(x, 3, 64, s);
        auto [best, best_cost] = exhaustive_partition_search(
            7, 3, [&](const Partition& p) { return kmeans_cost(x, p); });
        if (r.objective <= best_cost + 1e-9) ++hits;
        CHECK(r.objective >= best_cost - 1e-9);
    }
    CHECK(hits >= 19);
}

TEST_CASE("kmeans restart monotonicity") {
    Rng rng(8);
    Matrix x = random_matrix(rng, 30, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (int restarts : {1, 4, 16, 64}) {
        double obj = kmeans(x, 4, restarts, 77).objective;
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
}

TEST_CASE("kernel kmeans edge cases") {
    Rng rng(9);
    Matrix x = random_matrix(rng, 8, 2);
    KernelKMeansResult r1 = kernel_kmeans(x, 1, KernelSpec{0.1}, 4, 3);
    CHECK(r1.partition.k == 1);
    CHECK_THROWS(kernel_kmeans(x, 9, KernelSpec{0.1}, 4, 3));

    // Duplicated points land in the same cluster at the optimum.
    Matrix dup(6, 1);
    double pos[6] = {0.0, 0.0, 0.0, 4.0, 4.0, 4.0};
    for (int i = 0; i < 6; ++i) dup(i, 0) = pos[i];
    KernelKMeansResult rd = kernel_kmeans(dup, 2, KernelSpec{0.1}, 16, 5);
    CHECK(rd.partition.assignment[0] == rd.partition.assignment[1]);
    CHECK(rd.partition.assignment[0] == rd.partition.assignment[2]);
    CHECK(rd.partition.assignment[3] == rd.partition.assignment[4]);
    CHECK(rd.partition.assignment[0] != rd.partition.assignment[3]);
}

TEST_CASE("kernel kmeans matches the exhaustive optimum") {
    int hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(200 + s);
        Matrix x = random_matrix(rng, 7, 2);
        Matrix gram = kernel_matrix(x, KernelSpec{0.1});
        KernelKMeansResult r = kernel_kmeans(x, 3, KernelSpec{0.1}, 64, s);
        auto [best, best_cost] = exhaustive_partition_search(
            7, 3, [&](const Partition& p) { return kkm_cost(gram, p); });
        if (r.objective <= best_cost + 1e-9) ++hits;
        CHECK(r.objective >= best_cost - 1e-9);
    }
    CHECK(hits >= 19);
}

TEST_CASE("kernel kmeans with a linear kernel reproduces kmeans") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng(300 + s);
        Matrix x = random_matrix(rng, 10, 2);
        Matrix gram(10, 10);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j) {
                double d = 0.0;
                for (std::size_t h = 0; h < 2; ++h) d += x(i, h) * x(j, h);
                gram(i, j) = d;
            }
        KernelKMeansResult kk = kernel_kmeans_on_matrix(gram, 2, 64, s);
        KMeansResult km = kmeans(x, 2, 64, s);
        // With K(i,j) = x_i . x_j the feature-space cost is the Euclidean one.
        CHECK(kk.objective == doctest::Approx(km.objective).epsilon(1e-9));
        CHECK(same_partition(kk.partition.assignment, km.partition.assignment));
    }
}

TEST_CASE("em k=1 recovers the closed-form gaussian MLE") {
    Rng rng(12);
    Matrix x = random_matrix(rng, 40, 2);
    EmResult r = em_gaussian_mixture(x, 1, 1, 9);
    CHECK(r.partition.k == 1);
    std::vector<double> mean(2, 0.0);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t h = 0; h < 2; ++h) mean[h] += x(i, h) / 40.0;
    for (std::size_t h = 0; h < 2; ++h)
        CHECK(r.mixture.means(0, h) == doctest::Approx(mean[h]).epsilon(1e-9));
    Matrix cov(2, 2);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b)
                cov(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]) / 40.0;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            CHECK(r.mixture.covariances[0](a, b) ==
                  doctest::Approx(cov(a, b)).epsilon(1e-6));
}

TEST_CASE("em log-likelihood ascends") {
    Dataset d = generate_synthetic({SyntheticCase::i, 21, 30});
    EmResult r = em_gaussian_mixture(d.points, 2, 4, 33);
    REQUIRE(r.ll_history.size() >= 2);
    for (std::size_t t = 1; t < r.ll_history.size(); ++t)
        CHECK(r.ll_history[t] >= r.ll_history[t - 1] - 1e-7);
}

TEST_CASE("em separates well-spread gaussian clusters") {
    Dataset d = generate_synthetic({SyntheticCase::i, 31});
    EmResult r = em_gaussian_mixture(d.points, 2, 8, 17);
    CHECK(adjusted_rand_index(r.partition.assignment, d.labels) >= 0.9);
}

TEST_CASE("em rejects identical points with k > 1") {
    Matrix x(5, 2, 1.0);
    CHECK_THROWS(em_gaussian_mixture(x, 2, 2, 1));
    CHECK_NOTHROW(em_gaussian_mixture(x, 1, 1, 1));
}

TEST_CASE("clustering determinism and permutation invariance") {
    Rng rng(14);
    Matrix x = random_matrix(rng, 16, 2);

    KMeansResult a = kmeans(x, 3, 8, 55);
    KMeansResult b = kmeans(x, 3, 8, 55);
    CHECK(a.partition.assignment == b.partition.assignment);
    CHECK(a.objective == b.objective);

    KernelKMeansResult ka = kernel_kmeans(x, 3, KernelSpec{0.1}, 8, 55);
    KernelKMeansResult kb = kernel_kmeans(x, 3, KernelSpec{0.1}, 8, 55);
    CHECK(ka.partition.assignment == kb.partition.assignment);

    // Reversing the sample order relabels but does not change the grouping
    // found by single linkage.
    Matrix rev(16, 2);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t h = 0; h < 2; ++h) rev(i, h) = x(15 - i, h);
    Partition p = single_linkage(x, 3);
    Partition pr = single_linkage(rev, 3);
    std::vector<int> unrev(16);
    for (std::size_t i = 0; i < 16; ++i) unrev[i] = pr.assignment[15 - i];
    CHECK(same_partition(p.assignment, unrev));
}
