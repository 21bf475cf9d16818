#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "l0filter/oracles.hpp"
#include "test_util.hpp"

using namespace l0filter;
using testutil::random_matrix;

TEST_CASE("hull membership accepts vertices and the mean") {
    Matrix tri(3, 2);
    tri(1, 0) = 1.0;
    tri(2, 1) = 1.0;

    auto [in_v, cert_v] = hull_membership({0.0, 0.0}, tri, 1e-8);
    CHECK(in_v);
    CHECK(cert_v.residual <= 1e-8);

    auto [in_m, cert_m] = hull_membership({1.0 / 3.0, 1.0 / 3.0}, tri, 1e-8);
    CHECK(in_m);
    CHECK(cert_m.residual <= 1e-8);
    double s = 0.0;
    for (double t : cert_m.theta) {
        CHECK(t >= 0.0);
        s += t;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hull membership rejects an exterior point with the right residual") {
    Matrix tri(3, 2);
    tri(1, 0) = 1.0;
    tri(2, 1) = 1.0;
    // (1, 1) projects onto the hypotenuse midpoint (0.5, 0.5); the distance
    // is sqrt(2)/2.
    auto [inside, cert] = hull_membership({1.0, 1.0}, tri, 1e-6);
    CHECK_FALSE(inside);
    CHECK(cert.residual == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("hull membership on random interior combinations") {
    Rng rng(51);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix pts = random_matrix(rng, 8, 3);
        std::vector<double> theta(8);
        double s = 0.0;
        for (double& t : theta) s += (t = rng.uniform());
        std::vector<double> p(3, 0.0);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t h = 0; h < 3; ++h) p[h] += theta[i] / s * pts(i, h);
        auto [inside, cert] = hull_membership(p, pts, 1e-6);
        CHECK(inside);
        CHECK(cert.residual <= 1e-6);
    }
}

TEST_CASE("finite difference gradient of a constant is zero") {
    Matrix z(3, 2, 0.7);
    Matrix g = finite_difference_gradient([](const Matrix&) { return 4.2; }, z, 1e-5);
    for (std::size_t t = 0; t < g.size(); ++t) CHECK(g.data()[t] == 0.0);
}

TEST_CASE("finite difference gradient of a quadratic") {
    Rng rng(53);
    Matrix z = random_matrix(rng, 4, 2);
    auto f = [](const Matrix& a) {
        double s = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) s += a.data()[t] * a.data()[t];
        return s;
    };
    Matrix g = finite_difference_gradient(f, z, 1e-6);
    for (std::size_t t = 0; t < g.size(); ++t)
        CHECK(g.data()[t] == doctest::Approx(2.0 * z.data()[t]).epsilon(1e-7));
}

TEST_CASE("partition enumeration visits every partition exactly once") {
    // Stirling number S(4, 2) = 7.
    int calls = 0;
    exhaustive_partition_search(4, 2, [&](const Partition& p) {
        ++calls;
        CHECK(p.k == 2);
        CHECK(p.assignment[0] == 0);  // canonical labels
        return 0.0;
    });
    CHECK(calls == 7);

    // S(5, 3) = 25.
    calls = 0;
    exhaustive_partition_search(5, 3, [&](const Partition&) {
        ++calls;
        return 0.0;
    });
    CHECK(calls == 25);

    CHECK_THROWS(exhaustive_partition_search(11, 2, [](const Partition&) { return 0.0; }));
    CHECK_THROWS(exhaustive_partition_search(4, 5, [](const Partition&) { return 0.0; }));
}

TEST_CASE("partition enumeration returns the minimizer") {
    // Objective that prefers splitting {0,1} from {2,3}.
    auto [best, val] = exhaustive_partition_search(4, 2, [](const Partition& p) {
        double cost = 0.0;
        if (p.assignment[0] != p.assignment[1]) cost += 1.0;
        if (p.assignment[2] != p.assignment[3]) cost += 1.0;
        if (p.assignment[0] == p.assignment[2]) cost += 1.0;
        return cost;
    });
    CHECK(val == 0.0);
    CHECK(best.assignment[0] == best.assignment[1]);
    CHECK(best.assignment[2] == best.assignment[3]);
    CHECK(best.assignment[0] != best.assignment[2]);
}

TEST_CASE("envelope relations hold on random draws") {
    Rng rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix x = random_matrix(rng, 6, 2);
        Matrix z = random_matrix(rng, 6, 2);
        PairWeights w = compute_weights(x, 0.1);
        double alpha = 0.1 + 10.0 * rng.uniform();
        double alpha_prime = alpha * (1.5 + rng.uniform());
        CHECK(check_envelope_relations(x, w, 0.7, z, alpha, alpha_prime));
    }
    Matrix x = random_matrix(rng, 4, 2);
    PairWeights w = compute_weights(x, 0.1);
    CHECK_THROWS(check_envelope_relations(x, w, 1.0, x, 2.0, 1.0));
}
