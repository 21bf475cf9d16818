#ifndef L0FILTER_DATASET_HPP
#define L0FILTER_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l0filter/matrix.hpp"

namespace l0filter {

struct Dataset {
    Matrix points;            // m x n
    std::vector<int> labels;  // empty when no ground truth; otherwise size m,
                              // contiguous class ids starting at 0
    std::string name;

    std::size_t size() const { return points.rows(); }
    std::size_t dim() const { return points.cols(); }
    bool has_labels() const { return !labels.empty(); }
    int num_classes() const;
};

// Per-feature affine map onto [-1, 1]. Constant features map to 0.
struct ScalingTransform {
    std::vector<double> center;      // (min + max) / 2
    std::vector<double> half_range;  // (max - min) / 2; 0 marks a constant feature

    Matrix apply(const Matrix& x) const;
    Matrix invert(const Matrix& y) const;
};

enum class SyntheticCase { i, ii, iii, iv };

struct SyntheticSpec {
    SyntheticCase tag = SyntheticCase::i;
    std::uint64_t seed = 0;
    // Test-only: when > 0, overrides each cluster's point count.
    std::size_t size_override = 0;
};

std::optional<SyntheticCase> parse_case_tag(const std::string& s);
std::string case_tag_name(SyntheticCase c);

// Number of ground-truth clusters per case (2, 2, 2, 4).
int case_num_clusters(SyntheticCase c);

// centers_out, when non-null, receives the generating cluster centers (one
// row per cluster).
Dataset generate_synthetic(const SyntheticSpec& spec, Matrix* centers_out = nullptr);

std::pair<ScalingTransform, Dataset> fit_scale(const Dataset& data);

// Rows with missing or unparseable feature cells are dropped; their count is
// written to *dropped_rows when non-null. A non-numeric first row is treated
// as a header. Throws std::runtime_error on unreadable files, zero usable
// rows, or a label column out of range.
Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column,
                 std::size_t* dropped_rows = nullptr);

// One sample per row, features then label last (if present), 17 significant
// digits, header row.
void write_csv(const Dataset& data, const std::string& path);

double dataset_diameter(const Matrix& points);

}  // namespace l0filter

#endif
