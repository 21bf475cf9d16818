#ifndef L0FILTER_PIPELINE_HPP
#define L0FILTER_PIPELINE_HPP

#include <string>
#include <vector>

#include "l0filter/clustering.hpp"
#include "l0filter/dataset.hpp"
#include "l0filter/evaluation.hpp"
#include "l0filter/solver.hpp"

namespace l0filter {

enum class Algorithm { SL, EMGM, KKM };

std::optional<Algorithm> parse_algorithm(const std::string& s);
std::string algorithm_name(Algorithm a);

struct ClusterConfig {
    int restarts = 100;
    KernelSpec kernel{0.1};   // KKM and the selection criterion
    double weight_theta = 0.1;
};

Partition apply_algorithm(const Matrix& points, int k, Algorithm a,
                          const ClusterConfig& config, std::uint64_t seed);

struct PipelineEntry {
    double lambda = 0.0;
    Matrix z;
    MergeGroups groups;
    Partition partition;
    CriterionValue criterion;
    SolveTrace trace;
    double seconds = 0.0;
    double ari = 0.0;        // vs ground truth, when labels are present
    bool failed = false;
    std::string error;
};

struct PipelineResult {
    std::vector<PipelineEntry> entries;
    int best_index = -1;
    Partition selected;
};

// For each lambda: solve the smooth problem, cluster the filtered points,
// map the partition back to the samples by index and score it with the kernel
// criterion on the samples. data is expected to be scaled already. Throws only
// if every lambda fails.
PipelineResult run_l0_filter_pipeline(const Dataset& data, int k, Algorithm algorithm,
                                      const std::vector<double>& lambda_grid,
                                      const SolverConfig& solver_config,
                                      const ClusterConfig& cluster_config,
                                      std::uint64_t seed);

PipelineResult run_ridge_filter_pipeline(const Dataset& data, int k, Algorithm algorithm,
                                         const std::vector<double>& lambda_grid,
                                         const SolverConfig& solver_config,
                                         const ClusterConfig& cluster_config,
                                         std::uint64_t seed);

// k-means to kbar = multiplier * k centroids, A on the centroids, points
// inherit their centroid's cluster.
Partition run_km_filter(const Dataset& data, int k, int kbar_multiplier,
                        Algorithm algorithm, const ClusterConfig& cluster_config,
                        std::uint64_t seed);

Partition run_baseline(const Dataset& data, int k, Algorithm algorithm,
                       const ClusterConfig& cluster_config, std::uint64_t seed);

// lambda, num_merge_groups, criterion, ari_if_labels, seconds
void write_pipeline_csv(const PipelineResult& result, bool has_labels,
                        const std::string& path);
// index, cluster
void write_partition_csv(const Partition& partition, const std::string& path);

}  // namespace l0filter

#endif
