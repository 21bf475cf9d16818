#include "l0filter/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "l0filter/rng.hpp"

namespace l0filter {

int Dataset::num_classes() const {
    if (labels.empty()) return 0;
    return 1 + *std::max_element(labels.begin(), labels.end());
}

Matrix ScalingTransform::apply(const Matrix& x) const {
    Matrix y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            y(i, j) = half_range[j] > 0.0 ? (x(i, j) - center[j]) / half_range[j] : 0.0;
    return y;
}

Matrix ScalingTransform::invert(const Matrix& y) const {
    Matrix x(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t j = 0; j < y.cols(); ++j)
            x(i, j) = half_range[j] > 0.0 ? y(i, j) * half_range[j] + center[j] : center[j];
    return x;
}

std::pair<ScalingTransform, Dataset> fit_scale(const Dataset& data) {
    if (data.size() < 1) throw std::invalid_argument("fit_scale: empty dataset");
    const Matrix& x = data.points;
    ScalingTransform t;
    t.center.resize(x.cols());
    t.half_range.resize(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double lo = x(0, j), hi = x(0, j);
        for (std::size_t i = 1; i < x.rows(); ++i) {
            lo = std::min(lo, x(i, j));
            hi = std::max(hi, x(i, j));
        }
        t.center[j] = (lo + hi) / 2.0;
        t.half_range[j] = (hi - lo) / 2.0;
    }
    Dataset scaled;
    scaled.points = t.apply(x);
    scaled.labels = data.labels;
    scaled.name = data.name;
    return {t, scaled};
}

std::optional<SyntheticCase> parse_case_tag(const std::string& s) {
    if (s == "i") return SyntheticCase::i;
    if (s == "ii") return SyntheticCase::ii;
    if (s == "iii") return SyntheticCase::iii;
    if (s == "iv") return SyntheticCase::iv;
    return std::nullopt;
}

std::string case_tag_name(SyntheticCase c) {
    switch (c) {
        case SyntheticCase::i: return "i";
        case SyntheticCase::ii: return "ii";
        case SyntheticCase::iii: return "iii";
        case SyntheticCase::iv: return "iv";
    }
    return "?";
}

int case_num_clusters(SyntheticCase c) {
    return c == SyntheticCase::iv ? 4 : 2;
}

namespace {

void append_gaussian_cluster(Rng& rng, Matrix& pts, std::vector<int>& labels,
                             std::size_t& row, std::size_t count, int label,
                             const std::vector<double>& mean,
                             const std::vector<double>& stddev) {
    for (std::size_t p = 0; p < count; ++p, ++row) {
        for (std::size_t j = 0; j < mean.size(); ++j)
            pts(row, j) = mean[j] + stddev[j] * rng.gaussian();
        labels[row] = label;
    }
}

Dataset two_cluster_case(Rng& rng, std::size_t m1, std::size_t m2,
                         std::vector<double> mean1, std::vector<double> sd1,
                         std::vector<double> mean2, std::vector<double> sd2,
                         std::size_t size_override) {
    if (size_override > 0) m1 = m2 = size_override;
    Dataset d;
    d.points = Matrix(m1 + m2, mean1.size());
    d.labels.resize(m1 + m2);
    std::size_t row = 0;
    append_gaussian_cluster(rng, d.points, d.labels, row, m1, 0, mean1, sd1);
    append_gaussian_cluster(rng, d.points, d.labels, row, m2, 1, mean2, sd2);
    return d;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec, Matrix* centers_out) {
    Rng rng(spec.seed);
    Dataset d;
    if (centers_out) {
        int k = case_num_clusters(spec.tag);
        int n = spec.tag == SyntheticCase::iv ? 3 : 2;
        *centers_out = Matrix(k, n);
    }
    switch (spec.tag) {
        case SyntheticCase::i:
            d = two_cluster_case(rng, 50, 50, {0, 0}, {0.33, 0.33}, {1, 1}, {0.33, 0.33},
                                 spec.size_override);
            break;
        case SyntheticCase::ii:
            d = two_cluster_case(rng, 500, 50, {0, 5}, {std::sqrt(0.05), std::sqrt(5.0)},
                                 {2.5, 0}, {std::sqrt(0.3), std::sqrt(0.05)},
                                 spec.size_override);
            break;
        case SyntheticCase::iii:
            d = two_cluster_case(rng, 500, 50, {0, 0}, {2, 2}, {7, 0},
                                 {std::sqrt(0.5), std::sqrt(0.5)}, spec.size_override);
            break;
        case SyntheticCase::iv: {
            const int k = 4, n = 3;
            std::vector<std::vector<double>> centers;
            // Redraw all four centers from scratch whenever any pair is
            // closer than 1.
            for (;;) {
                centers.assign(k, std::vector<double>(n));
                for (auto& c : centers)
                    for (double& v : c) v = std::sqrt(5.0) * rng.gaussian();
                bool ok = true;
                for (int a = 0; a < k && ok; ++a)
                    for (int b = a + 1; b < k && ok; ++b) {
                        double s = 0;
                        for (int j = 0; j < n; ++j) {
                            double diff = centers[a][j] - centers[b][j];
                            s += diff * diff;
                        }
                        if (s < 1.0) ok = false;
                    }
                if (ok) break;
            }
            std::vector<std::size_t> sizes(k);
            for (auto& s : sizes)
                s = spec.size_override > 0 ? spec.size_override : 10 + rng.below(91);
            std::size_t m = 0;
            for (auto s : sizes) m += s;
            d.points = Matrix(m, n);
            d.labels.resize(m);
            std::size_t row = 0;
            for (int c = 0; c < k; ++c)
                append_gaussian_cluster(rng, d.points, d.labels, row, sizes[c], c,
                                        centers[c], {1, 1, 1});
            if (centers_out)
                for (int c = 0; c < k; ++c)
                    for (int j = 0; j < n; ++j) (*centers_out)(c, j) = centers[c][j];
            break;
        }
    }
    if (centers_out && spec.tag != SyntheticCase::iv) {
        static const double mu[3][2][2] = {
            {{0, 0}, {1, 1}}, {{0, 5}, {2.5, 0}}, {{0, 0}, {7, 0}}};
        int c = (int)spec.tag;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) (*centers_out)(a, b) = mu[c][a][b];
    }
    d.name = "case_" + case_tag_name(spec.tag);
    return d;
}

namespace {

bool parse_double(const std::string& cell, double& out) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    if (b == e) return false;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e && std::isfinite(out);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column,
                 std::size_t* dropped_rows) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: empty file " + path);

    const std::size_t ncols = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != ncols)
            throw std::runtime_error("load_csv: non-uniform column count in " + path);

    if (label_column && *label_column >= ncols)
        throw std::runtime_error("load_csv: label column out of range");

    // Header detection: a first row whose non-label cells do not all parse
    // as numbers.
    std::size_t first = 0;
    {
        bool numeric = true;
        for (std::size_t j = 0; j < ncols && numeric; ++j) {
            if (label_column && j == *label_column) continue;
            double v;
            if (!parse_double(rows[0][j], v)) numeric = false;
        }
        if (!numeric) first = 1;
    }

    const std::size_t nfeat = label_column ? ncols - 1 : ncols;
    std::vector<std::vector<double>> feats;
    std::vector<std::string> raw_labels;
    std::size_t dropped = 0;
    for (std::size_t r = first; r < rows.size(); ++r) {
        std::vector<double> f;
        f.reserve(nfeat);
        bool ok = true;
        for (std::size_t j = 0; j < ncols; ++j) {
            if (label_column && j == *label_column) continue;
            double v;
            if (!parse_double(rows[r][j], v)) {
                ok = false;
                break;
            }
            f.push_back(v);
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        feats.push_back(std::move(f));
        if (label_column) raw_labels.push_back(rows[r][*label_column]);
    }
    if (dropped_rows) *dropped_rows = dropped;
    if (feats.empty()) throw std::runtime_error("load_csv: no usable rows in " + path);

    Dataset d;
    d.points = Matrix(feats.size(), nfeat);
    for (std::size_t i = 0; i < feats.size(); ++i)
        for (std::size_t j = 0; j < nfeat; ++j) d.points(i, j) = feats[i][j];
    if (label_column) {
        // Classes become contiguous ids in order of first appearance.
        std::map<std::string, int> ids;
        d.labels.resize(feats.size());
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
            auto it = ids.find(raw_labels[i]);
            if (it == ids.end()) it = ids.emplace(raw_labels[i], (int)ids.size()).first;
            d.labels[i] = it->second;
        }
    }
    d.name = path;
    return d;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t j = 0; j < data.dim(); ++j)
        std::fprintf(f, "%sf%zu", j ? "," : "", j);
    if (data.has_labels()) std::fprintf(f, ",label");
    std::fprintf(f, "\n");
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j)
            std::fprintf(f, "%s%.17g", j ? "," : "", data.points(i, j));
        if (data.has_labels()) std::fprintf(f, ",%d", data.labels[i]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

double dataset_diameter(const Matrix& points) {
    double best = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i)
        for (std::size_t j = i + 1; j < points.rows(); ++j)
            best = std::max(best, sq_dist_rows(points, i, points, j));
    return std::sqrt(best);
}

}  // namespace l0filter
