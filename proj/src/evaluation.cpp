#include "l0filter/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

namespace l0filter {

CriterionValue criterion_c(const Partition& partition, const Matrix& points,
                           const KernelSpec& kernel) {
    const std::size_t m = points.rows();
    if (partition.assignment.size() != m)
        throw std::invalid_argument("criterion_c: partition/data size mismatch");
    const int k = partition.k;
    if (k < 2) throw std::invalid_argument("criterion_c: k < 2");

    CriterionValue c;
    c.d_w.assign(k, 0.0);
    c.n_p.assign(k, 0);
    // Single pass over all pairs; each kernel distance is evaluated once.
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            double d = kernel_distance(points[i], points[j], points.cols(), kernel);
            if (partition.assignment[i] == partition.assignment[j]) {
                c.d_w[partition.assignment[i]] += d;
                ++c.n_p[partition.assignment[i]];
            } else {
                c.d_b += d;
            }
        }

    if (c.d_b <= 0.0) {
        c.sentinel = true;
        c.value = 0.0;
        return c;
    }
    double s = 0.0;
    for (int t = 0; t < k; ++t)
        if (c.n_p[t] > 0) s += c.d_w[t] / (double)c.n_p[t];
    c.value = s / c.d_b;
    return c;
}

double adjusted_rand_index(const std::vector<int>& p, const std::vector<int>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("adjusted_rand_index: length mismatch");
    const std::size_t m = p.size();
    int kp = 1 + *std::max_element(p.begin(), p.end());
    int kq = 1 + *std::max_element(q.begin(), q.end());
    std::vector<long long> table((std::size_t)kp * kq, 0), row(kp, 0), col(kq, 0);
    for (std::size_t i = 0; i < m; ++i) {
        ++table[(std::size_t)p[i] * kq + q[i]];
        ++row[p[i]];
        ++col[q[i]];
    }
    auto choose2 = [](long long v) { return v * (v - 1) / 2.0; };
    double index = 0.0, rows = 0.0, cols = 0.0;
    for (long long v : table) index += choose2(v);
    for (long long v : row) rows += choose2(v);
    for (long long v : col) cols += choose2(v);
    double total = choose2((long long)m);
    double expected = rows * cols / total;
    double max_index = (rows + cols) / 2.0;
    // max = expected only when both partitions are the same trivial one (all
    // in one cluster, or all singletons); they agree perfectly.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double adjusted_rand_index(const Partition& p, const Partition& q) {
    return adjusted_rand_index(p.assignment, q.assignment);
}

}  // namespace l0filter
