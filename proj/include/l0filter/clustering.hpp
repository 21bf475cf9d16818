#ifndef L0FILTER_CLUSTERING_HPP
#define L0FILTER_CLUSTERING_HPP

#include <cstdint>
#include <vector>

#include "l0filter/matrix.hpp"

namespace l0filter {

struct Partition {
    std::vector<int> assignment;  // cluster id per sample, in [0, k)
    int k = 0;
};

struct KernelSpec {
    double gamma = 0.1;
};

double gaussian_kernel(const double* x, const double* y, std::size_t n, double gamma);
double gaussian_kernel(const std::vector<double>& x, const std::vector<double>& y,
                       double gamma);

// Squared feature-space distance K(x,x) - 2K(x,y) + K(y,y); for the Gaussian
// kernel this is 2(1 - exp(-gamma ||x-y||^2)), in [0, 2).
double kernel_distance(const double* x, const double* y, std::size_t n,
                       const KernelSpec& kernel);
double kernel_distance(const std::vector<double>& x, const std::vector<double>& y,
                       const KernelSpec& kernel);

// m x m Gaussian kernel matrix.
Matrix kernel_matrix(const Matrix& points, const KernelSpec& kernel);

// Agglomerative merging under minimum pairwise Euclidean distance until k
// clusters remain. Ties merge the lexicographically smallest cluster pair.
Partition single_linkage(const Matrix& points, int k);

struct KMeansResult {
    Partition partition;
    Matrix centroids;  // k x n
    double objective = 0.0;
};

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed);

struct KernelKMeansResult {
    Partition partition;
    double objective = 0.0;
};

KernelKMeansResult kernel_kmeans(const Matrix& points, int k, const KernelSpec& kernel,
                                 int restarts, std::uint64_t seed);

// Test hook: same assignment loop on a caller-supplied kernel matrix (e.g. a
// linear kernel, which reproduces plain k-means).
KernelKMeansResult kernel_kmeans_on_matrix(const Matrix& gram, int k, int restarts,
                                           std::uint64_t seed);

struct GaussianMixture {
    std::vector<double> weights;          // k mixing proportions
    Matrix means;                         // k x n
    std::vector<Matrix> covariances;      // k of n x n
};

struct EmResult {
    Partition partition;
    GaussianMixture mixture;
    double log_likelihood = 0.0;
    std::vector<double> ll_history;  // per-iteration, best restart
};

EmResult em_gaussian_mixture(const Matrix& points, int k, int restarts,
                             std::uint64_t seed);

}  // namespace l0filter

#endif
