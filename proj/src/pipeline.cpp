#include "l0filter/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "l0filter/rng.hpp"

namespace l0filter {

std::optional<Algorithm> parse_algorithm(const std::string& s) {
    if (s == "SL" || s == "sl") return Algorithm::SL;
    if (s == "EMGM" || s == "emgm") return Algorithm::EMGM;
    if (s == "KKM" || s == "kkm") return Algorithm::KKM;
    return std::nullopt;
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::SL: return "SL";
        case Algorithm::EMGM: return "EMGM";
        case Algorithm::KKM: return "KKM";
    }
    return "?";
}

Partition apply_algorithm(const Matrix& points, int k, Algorithm a,
                          const ClusterConfig& config, std::uint64_t seed) {
    switch (a) {
        case Algorithm::SL:
            return single_linkage(points, k);
        case Algorithm::EMGM:
            return em_gaussian_mixture(points, k, config.restarts, seed).partition;
        case Algorithm::KKM:
            return kernel_kmeans(points, k, config.kernel, config.restarts, seed)
                .partition;
    }
    throw std::logic_error("apply_algorithm: unknown algorithm");
}

namespace {

using FilterSolve = std::function<std::pair<Matrix, SolveTrace>(double lambda)>;

PipelineResult run_filter_pipeline(const Dataset& data, int k, Algorithm algorithm,
                                   const std::vector<double>& lambda_grid,
                                   const SolverConfig& solver_config,
                                   const ClusterConfig& cluster_config,
                                   std::uint64_t seed, const FilterSolve& solve) {
    if (k < 2 || (std::size_t)k > data.size())
        throw std::invalid_argument("pipeline: need 2 <= k <= m");
    if (lambda_grid.empty()) throw std::invalid_argument("pipeline: empty lambda grid");

    Partition truth;
    if (data.has_labels()) {
        truth.assignment = data.labels;
        truth.k = data.num_classes();
    }

    PipelineResult result;
    result.entries.resize(lambda_grid.size());
    for (std::size_t t = 0; t < lambda_grid.size(); ++t) {
        PipelineEntry& e = result.entries[t];
        e.lambda = lambda_grid[t];
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto [z, trace] = solve(e.lambda);
            e.z = std::move(z);
            e.trace = std::move(trace);
            e.groups = merge_centroids(e.z, data.points, solver_config.merge_tol_rel);
            // Step 4/5: cluster the filtered points; the partition of X is the
            // same index assignment.
            e.partition = apply_algorithm(e.z, k, algorithm, cluster_config,
                                          derive_seed(seed, t));
            e.criterion = criterion_c(e.partition, data.points, cluster_config.kernel);
            if (data.has_labels()) e.ari = adjusted_rand_index(e.partition, truth);
        } catch (const std::exception& ex) {
            e.failed = true;
            e.error = ex.what();
        }
        e.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    for (std::size_t t = 0; t < result.entries.size(); ++t) {
        const PipelineEntry& e = result.entries[t];
        if (e.failed) continue;
        if (result.best_index < 0 ||
            e.criterion.better_than(result.entries[result.best_index].criterion))
            result.best_index = (int)t;
    }
    if (result.best_index < 0)
        throw std::runtime_error("pipeline: every lambda failed; first error: " +
                                 result.entries.front().error);
    result.selected = result.entries[result.best_index].partition;
    return result;
}

}  // namespace

PipelineResult run_l0_filter_pipeline(const Dataset& data, int k, Algorithm algorithm,
                                      const std::vector<double>& lambda_grid,
                                      const SolverConfig& solver_config,
                                      const ClusterConfig& cluster_config,
                                      std::uint64_t seed) {
    PairWeights w = compute_weights(data.points, cluster_config.weight_theta);
    FilterSolve solve = [&](double lambda) {
        return solve_smooth_l0(data.points, w, lambda, solver_config);
    };
    return run_filter_pipeline(data, k, algorithm, lambda_grid, solver_config,
                               cluster_config, seed, solve);
}

PipelineResult run_ridge_filter_pipeline(const Dataset& data, int k, Algorithm algorithm,
                                         const std::vector<double>& lambda_grid,
                                         const SolverConfig& solver_config,
                                         const ClusterConfig& cluster_config,
                                         std::uint64_t seed) {
    PairWeights w = compute_weights(data.points, cluster_config.weight_theta);
    FilterSolve solve = [&](double lambda) {
        return std::make_pair(solve_ridge(data.points, w, lambda, solver_config.tol_floor),
                              SolveTrace{});
    };
    return run_filter_pipeline(data, k, algorithm, lambda_grid, solver_config,
                               cluster_config, seed, solve);
}

Partition run_km_filter(const Dataset& data, int k, int kbar_multiplier,
                        Algorithm algorithm, const ClusterConfig& cluster_config,
                        std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("run_km_filter: k < 1");
    const std::size_t kbar = (std::size_t)kbar_multiplier * k;
    if (kbar > data.size())
        throw std::invalid_argument("run_km_filter: kbar exceeds sample count");
    KMeansResult km =
        kmeans(data.points, (int)kbar, cluster_config.restarts, derive_seed(seed, 1));
    Partition on_centroids = apply_algorithm(km.centroids, k, algorithm, cluster_config,
                                             derive_seed(seed, 2));
    Partition p;
    p.k = on_centroids.k;
    p.assignment.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        p.assignment[i] = on_centroids.assignment[km.partition.assignment[i]];
    return p;
}

Partition run_baseline(const Dataset& data, int k, Algorithm algorithm,
                       const ClusterConfig& cluster_config, std::uint64_t seed) {
    if (k < 2 || (std::size_t)k > data.size())
        throw std::invalid_argument("run_baseline: need 2 <= k <= m");
    return apply_algorithm(data.points, k, algorithm, cluster_config, seed);
}

void write_pipeline_csv(const PipelineResult& result, bool has_labels,
                        const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_pipeline_csv: cannot open " + path);
    std::fprintf(f, "lambda,num_merge_groups,criterion,ari,seconds\n");
    for (const auto& e : result.entries) {
        if (e.failed) {
            std::fprintf(f, "%.17g,NA,NA,NA,%.17g\n", e.lambda, e.seconds);
            continue;
        }
        std::fprintf(f, "%.17g,%d,", e.lambda, e.groups.num_groups);
        if (e.criterion.sentinel)
            std::fprintf(f, "inf,");
        else
            std::fprintf(f, "%.17g,", e.criterion.value);
        if (has_labels)
            std::fprintf(f, "%.17g,", e.ari);
        else
            std::fprintf(f, "NA,");
        std::fprintf(f, "%.17g\n", e.seconds);
    }
    std::fclose(f);
}

void write_partition_csv(const Partition& partition, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_partition_csv: cannot open " + path);
    std::fprintf(f, "index,cluster\n");
    for (std::size_t i = 0; i < partition.assignment.size(); ++i)
        std::fprintf(f, "%zu,%d\n", i, partition.assignment[i]);
    std::fclose(f);
}

}  // namespace l0filter
