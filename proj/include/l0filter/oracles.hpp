#ifndef L0FILTER_ORACLES_HPP
#define L0FILTER_ORACLES_HPP

#include <functional>
#include <vector>

#include "l0filter/clustering.hpp"
#include "l0filter/model.hpp"

namespace l0filter {

struct HullCertificate {
    std::vector<double> theta;  // convex coefficients, length m
    double residual = 0.0;      // ||sum theta_i x_i - point||
};

// Decides membership of a point in conv(X) by minimizing the residual over
// the probability simplex with an away-step Frank-Wolfe loop.
std::pair<bool, HullCertificate> hull_membership(const std::vector<double>& point,
                                                 const Matrix& points, double tol);

using ScalarObjective = std::function<double(const Matrix&)>;

// Central differences per coordinate.
Matrix finite_difference_gradient(const ScalarObjective& objective, const Matrix& z,
                                  double step);

using PartitionObjective = std::function<double(const Partition&)>;

// Enumerates all partitions of m points into exactly k non-empty clusters via
// restricted-growth strings; m <= 10. Returns the global minimum.
std::pair<Partition, double> exhaustive_partition_search(std::size_t m, int k,
                                                         const PartitionObjective& objective);

// g(z; alpha) <= g(z; alpha') <= phi(z) for 0 < alpha < alpha', up to
// round-off slack 1e-15 * |phi(z)|.
bool check_envelope_relations(const Matrix& x, const PairWeights& w, double lambda,
                              const Matrix& z, double alpha, double alpha_prime);

}  // namespace l0filter

#endif
