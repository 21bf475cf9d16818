// Timing comparison of the parallel pair kernels against the serial reference
// implementations. Usage: bench_kernels [m ...]; defaults to 100 300 600.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "l0filter/model.hpp"
#include "l0filter/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace l0filter;

namespace {

template <typename F>
double time_best_of(int reps, const F& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();
        if (s < best) best = s;
    }
    return best;
}

volatile double sink;

void bench_size(std::size_t m, std::size_t n) {
    Rng rng(7);
    Matrix x(m, n), z(m, n), d(m, n);
    for (std::size_t t = 0; t < x.size(); ++t) {
        x.data()[t] = rng.gaussian();
        z.data()[t] = rng.gaussian();
        d.data()[t] = rng.gaussian();
    }
    PairWeights w = compute_weights(x, 0.1);
    SmoothProblem p{&x, &w, 0.5, 10.0};
    const int reps = m <= 300 ? 7 : 3;

    struct Row {
        const char* name;
        double serial;
        double parallel;
    };
    std::vector<Row> rows;

    rows.push_back({"compute_weights",
                    time_best_of(reps, [&] { sink = serial::compute_weights(x, 0.1).w[0]; }),
                    time_best_of(reps, [&] { sink = compute_weights(x, 0.1).w[0]; })});
    rows.push_back({"smooth objective",
                    time_best_of(reps, [&] { sink = serial::eval_smooth_objective(p, z); }),
                    time_best_of(reps, [&] { sink = eval_smooth_objective(p, z); })});
    rows.push_back({"smooth gradient",
                    time_best_of(reps, [&] { sink = serial::grad_smooth(p, z)(0, 0); }),
                    time_best_of(reps, [&] { sink = grad_smooth(p, z)(0, 0); })});
    rows.push_back({"smooth hessvec",
                    time_best_of(reps, [&] { sink = serial::hessvec_smooth(p, z, d)(0, 0); }),
                    time_best_of(reps, [&] { sink = hessvec_smooth(p, z, d)(0, 0); })});
    rows.push_back({"ridge gradient",
                    time_best_of(reps, [&] { sink = serial::grad_ridge(x, w, 0.5, z)(0, 0); }),
                    time_best_of(reps, [&] { sink = grad_ridge(x, w, 0.5, z)(0, 0); })});

    std::printf("m = %zu, n = %zu\n", m, n);
    std::printf("  %-18s %12s %12s %8s\n", "kernel", "serial (s)", "parallel (s)",
                "speedup");
    for (const Row& r : rows)
        std::printf("  %-18s %12.6f %12.6f %7.2fx\n", r.name, r.serial, r.parallel,
                    r.serial / r.parallel);
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif
    std::vector<std::size_t> sizes;
    for (int i = 1; i < argc; ++i) sizes.push_back((std::size_t)std::atoll(argv[i]));
    if (sizes.empty()) sizes = {100, 300, 600};
    for (std::size_t m : sizes) bench_size(m, 3);
    return 0;
}
