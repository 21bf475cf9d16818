#ifndef L0FILTER_EVALUATION_HPP
#define L0FILTER_EVALUATION_HPP

#include <vector>

#include "l0filter/clustering.hpp"

namespace l0filter {

struct CriterionValue {
    double value = 0.0;
    bool sentinel = false;        // d_b = 0: ranked worse than any finite value
    std::vector<double> d_w;      // per-cluster within-distance sums
    std::vector<long long> n_p;   // per-cluster pair counts
    double d_b = 0.0;

    // Ordering used for lambda selection; lower is better, sentinel loses.
    bool better_than(const CriterionValue& o) const {
        if (sentinel != o.sentinel) return o.sentinel;
        return value < o.value;
    }
};

// c(P) = (1/d_b) * sum_i d_w(i)/n_p(i) over kernel distances; singleton
// clusters contribute 0. Requires k >= 2.
CriterionValue criterion_c(const Partition& partition, const Matrix& points,
                           const KernelSpec& kernel);

// Hubert-Arabie adjusted Rand index. Throws on length mismatch.
double adjusted_rand_index(const Partition& p, const Partition& q);
double adjusted_rand_index(const std::vector<int>& p, const std::vector<int>& q);

}  // namespace l0filter

#endif
