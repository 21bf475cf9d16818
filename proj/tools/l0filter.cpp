// Command-line front end: dataset generation, centroid filtering, clustering
// with lambda selection, the full benchmark matrix, and timing exports.
//
// Exit codes: 0 success, 2 invalid input or config, 3 numerical failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "l0filter/pipeline.hpp"
#include "l0filter/rng.hpp"

using namespace l0filter;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitNumerical = 3;

double now_seconds() {
    static auto t0 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Dataset load_input(const std::string& path, std::optional<std::size_t> label_col) {
    std::size_t dropped = 0;
    Dataset d = load_csv(path, label_col, &dropped);
    if (dropped > 0)
        std::fprintf(stderr, "note: dropped %zu rows with unparsable cells\n", dropped);
    return d;
}

void write_centroids_csv(const Matrix& z, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    for (std::size_t j = 0; j < z.cols(); ++j) std::fprintf(f, "%sz%zu", j ? "," : "", j);
    std::fprintf(f, "\n");
    for (std::size_t i = 0; i < z.rows(); ++i) {
        for (std::size_t j = 0; j < z.cols(); ++j)
            std::fprintf(f, "%s%.17g", j ? "," : "", z(i, j));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

// ---- generate --------------------------------------------------------------

int cmd_generate(const std::string& case_tag, std::uint64_t seed,
                 const std::string& out) {
    auto tag = parse_case_tag(case_tag);
    if (!tag) {
        std::fprintf(stderr, "unknown case tag '%s' (use i, ii, iii or iv)\n",
                     case_tag.c_str());
        return kExitBadInput;
    }
    Dataset d = generate_synthetic({*tag, seed});
    write_csv(d, out);
    std::printf("m = %zu, n = %zu, k = %d\n", d.size(), d.dim(), case_num_clusters(*tag));
    return 0;
}

// ---- filter ----------------------------------------------------------------

int cmd_filter(const std::string& input, std::optional<std::size_t> label_col,
               const std::string& method, int grid_size, double fixed_lambda,
               bool have_fixed_lambda, const std::string& out_dir) {
    if (method != "l0" && method != "ridge") {
        std::fprintf(stderr, "unknown method '%s' (use l0 or ridge)\n", method.c_str());
        return kExitBadInput;
    }
    std::filesystem::create_directories(out_dir);
    Dataset raw;
    try {
        raw = load_input(input, label_col);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitBadInput;
    }
    auto [tf, data] = fit_scale(raw);
    PairWeights w = compute_weights(data.points, 0.1);
    SolverConfig cfg;

    std::vector<double> grid;
    if (have_fixed_lambda) {
        grid = {fixed_lambda};
    } else {
        try {
            double lmax = method == "l0"
                              ? find_lambda_max(make_l0_collapse_probe(data.points, w, cfg))
                              : find_lambda_max(
                                    make_ridge_collapse_probe(data.points, w, cfg));
            grid = build_lambda_grid(lmax, grid_size);
            std::printf("lambda_max = %.17g\n", lmax);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "lambda grid construction failed: %s\n", e.what());
            return kExitNumerical;
        }
    }

    std::string trace_path = out_dir + "/trace.csv";
    std::size_t failures = 0;
    bool wrote_trace = false;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        try {
            Matrix z;
            SolveTrace trace;
            if (method == "l0") {
                auto res = solve_smooth_l0(data.points, w, grid[t], cfg);
                z = std::move(res.first);
                trace = std::move(res.second);
            } else {
                double t0 = now_seconds();
                z = solve_ridge(data.points, w, grid[t], cfg.tol_floor);
                trace.total_seconds = now_seconds() - t0;
            }
            char name[64];
            std::snprintf(name, sizeof name, "/centroids_%03zu.csv", t);
            write_centroids_csv(z, out_dir + name);
            append_trace_csv(trace_path, grid[t], trace, !wrote_trace);
            wrote_trace = true;
            std::printf("lambda %.6g: %d merge groups, %.3fs\n", grid[t],
                        merge_centroids(z, data.points, cfg.merge_tol_rel).num_groups,
                        trace.total_seconds);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "lambda %.6g failed: %s\n", grid[t], e.what());
            ++failures;
        }
    }
    if (failures == grid.size()) {
        std::fprintf(stderr, "every lambda failed\n");
        return kExitNumerical;
    }
    return 0;
}

// ---- cluster ---------------------------------------------------------------

int cmd_cluster(const std::string& input, std::optional<std::size_t> label_col,
                const std::string& algorithm_name_arg, int k, const std::string& method,
                int grid_size, int restarts, double gamma, std::uint64_t seed,
                int km_multiplier, const std::string& out) {
    auto alg = parse_algorithm(algorithm_name_arg);
    if (!alg) {
        std::fprintf(stderr, "unknown algorithm '%s' (use SL, EMGM or KKM)\n",
                     algorithm_name_arg.c_str());
        return kExitBadInput;
    }
    if (method != "none" && method != "l0" && method != "ridge" && method != "km") {
        std::fprintf(stderr, "unknown method '%s' (use none, l0, ridge or km)\n",
                     method.c_str());
        return kExitBadInput;
    }
    Dataset raw;
    try {
        raw = load_input(input, label_col);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitBadInput;
    }
    auto [tf, data] = fit_scale(raw);
    ClusterConfig ccfg;
    ccfg.restarts = restarts;
    ccfg.kernel.gamma = gamma;
    SolverConfig scfg;

    Partition selected;
    try {
        if (method == "none") {
            selected = run_baseline(data, k, *alg, ccfg, seed);
        } else if (method == "km") {
            selected = run_km_filter(data, k, km_multiplier, *alg, ccfg, seed);
        } else {
            PairWeights w = compute_weights(data.points, ccfg.weight_theta);
            double lmax =
                method == "l0"
                    ? find_lambda_max(make_l0_collapse_probe(data.points, w, scfg))
                    : find_lambda_max(make_ridge_collapse_probe(data.points, w, scfg));
            auto grid = build_lambda_grid(lmax, grid_size);
            PipelineResult r =
                method == "l0"
                    ? run_l0_filter_pipeline(data, k, *alg, grid, scfg, ccfg, seed)
                    : run_ridge_filter_pipeline(data, k, *alg, grid, scfg, ccfg, seed);
            selected = r.selected;
            const PipelineEntry& best = r.entries[r.best_index];
            std::printf("selected lambda %.6g (criterion %.6g, %d merge groups)\n",
                        best.lambda, best.criterion.value, best.groups.num_groups);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "clustering failed: %s\n", e.what());
        return kExitNumerical;
    }

    write_partition_csv(selected, out);
    if (data.has_labels())
        std::printf("ari = %.6f\n",
                    adjusted_rand_index(selected.assignment, data.labels));
    return 0;
}

// ---- bench -----------------------------------------------------------------

struct BenchDataset {
    std::string name;
    std::optional<SyntheticCase> case_tag;
    std::string csv;
    std::optional<std::size_t> label_col;
    int k = 2;
};

struct BenchConfig {
    int grid_size = 150;
    int restarts = 100;
    double gamma = 0.1;
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::string> methods;     // baseline, l0, ridge, km5, km10, km20
    std::vector<Algorithm> algorithms;
    std::vector<BenchDataset> datasets;
    int jobs = 1;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Config grammar: 'key = value' lines; '#' starts a comment; a '[dataset]'
// line opens a new dataset section whose keys are case/csv/label_col/k/name.
bool parse_bench_config(const std::string& path, BenchConfig& cfg, std::string& err) {
    std::ifstream in(path);
    if (!in) {
        err = "cannot open config " + path;
        return false;
    }
    BenchDataset* cur = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s == "[dataset]") {
            cfg.datasets.emplace_back();
            cur = &cfg.datasets.back();
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            err = path + ":" + std::to_string(lineno) + ": expected key = value";
            return false;
        }
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        try {
            if (cur) {
                if (key == "case") {
                    auto tag = parse_case_tag(val);
                    if (!tag) throw std::runtime_error("bad case tag " + val);
                    cur->case_tag = *tag;
                    if (cur->name.empty()) cur->name = "case_" + val;
                    cur->k = case_num_clusters(*tag);
                } else if (key == "csv") {
                    cur->csv = val;
                    if (cur->name.empty()) cur->name = val;
                } else if (key == "label_col") {
                    cur->label_col = std::stoul(val);
                } else if (key == "k") {
                    cur->k = std::stoi(val);
                } else if (key == "name") {
                    cur->name = val;
                } else {
                    throw std::runtime_error("unknown dataset key " + key);
                }
            } else if (key == "grid_size") {
                cfg.grid_size = std::stoi(val);
            } else if (key == "restarts") {
                cfg.restarts = std::stoi(val);
            } else if (key == "gamma") {
                cfg.gamma = std::stod(val);
            } else if (key == "jobs") {
                cfg.jobs = std::stoi(val);
            } else if (key == "seeds") {
                cfg.seeds.clear();
                for (const auto& v : split_list(val)) cfg.seeds.push_back(std::stoull(v));
            } else if (key == "methods") {
                cfg.methods = split_list(val);
            } else if (key == "algorithms") {
                cfg.algorithms.clear();
                for (const auto& v : split_list(val)) {
                    auto a = parse_algorithm(v);
                    if (!a) throw std::runtime_error("unknown algorithm " + v);
                    cfg.algorithms.push_back(*a);
                }
            } else {
                throw std::runtime_error("unknown key " + key);
            }
        } catch (const std::exception& e) {
            err = path + ":" + std::to_string(lineno) + ": " + e.what();
            return false;
        }
    }
    if (cfg.methods.empty()) {
        err = "empty methods list";
        return false;
    }
    if (cfg.algorithms.empty())
        cfg.algorithms = {Algorithm::SL, Algorithm::EMGM, Algorithm::KKM};
    if (cfg.datasets.empty()) {
        err = "no [dataset] sections";
        return false;
    }
    if (cfg.seeds.empty()) {
        err = "empty seeds list";
        return false;
    }
    for (const auto& d : cfg.datasets)
        if (!d.case_tag && d.csv.empty()) {
            err = "dataset without case or csv";
            return false;
        }
    return true;
}

struct BenchCell {
    std::size_t dataset = 0;
    std::string method;   // method row tag, e.g. "l0 + SL"
    bool ok = false;
    double ari = 0.0;     // mean over seeds
    double seconds = 0.0;
    std::string error;
};

std::string method_row_name(const std::string& method, Algorithm a) {
    if (method == "baseline") return algorithm_name(a);
    if (method == "l0") return "l0 filter + " + algorithm_name(a);
    if (method == "ridge") return "ridge filter + " + algorithm_name(a);
    // km5 / km10 / km20
    int mult = std::stoi(method.substr(2));
    return "KM filter (kbar=" + std::to_string(mult) + "k) + " + algorithm_name(a);
}

double bench_one(const Dataset& scaled, const BenchDataset& ds,
                 const std::string& method, Algorithm alg, const BenchConfig& cfg,
                 std::uint64_t seed) {
    ClusterConfig ccfg;
    ccfg.restarts = cfg.restarts;
    ccfg.kernel.gamma = cfg.gamma;
    SolverConfig scfg;
    if (method == "baseline") {
        Partition p = run_baseline(scaled, ds.k, alg, ccfg, seed);
        return adjusted_rand_index(p.assignment, scaled.labels);
    }
    if (method.rfind("km", 0) == 0) {
        int mult = std::stoi(method.substr(2));
        Partition p = run_km_filter(scaled, ds.k, mult, alg, ccfg, seed);
        return adjusted_rand_index(p.assignment, scaled.labels);
    }
    PairWeights w = compute_weights(scaled.points, ccfg.weight_theta);
    double lmax = method == "l0"
                      ? find_lambda_max(make_l0_collapse_probe(scaled.points, w, scfg))
                      : find_lambda_max(make_ridge_collapse_probe(scaled.points, w, scfg));
    auto grid = build_lambda_grid(lmax, cfg.grid_size);
    PipelineResult r =
        method == "l0"
            ? run_l0_filter_pipeline(scaled, ds.k, alg, grid, scfg, ccfg, seed)
            : run_ridge_filter_pipeline(scaled, ds.k, alg, grid, scfg, ccfg, seed);
    return r.entries[r.best_index].ari;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, int jobs_flag) {
    BenchConfig cfg;
    std::string err;
    if (!parse_bench_config(config_path, cfg, err)) {
        std::fprintf(stderr, "%s\n", err.c_str());
        return kExitBadInput;
    }
    if (jobs_flag > 0) cfg.jobs = jobs_flag;
    std::filesystem::create_directories(out_dir);
    for (const auto& m : cfg.methods)
        if (m != "baseline" && m != "l0" && m != "ridge" && m != "km5" && m != "km10" &&
            m != "km20") {
            std::fprintf(stderr, "unknown method '%s'\n", m.c_str());
            return kExitBadInput;
        }

    // Per-seed datasets are materialized up front; synthetic cases redraw per
    // seed, CSV datasets are fixed.
    std::vector<std::vector<Dataset>> data(cfg.datasets.size());
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
        const BenchDataset& ds = cfg.datasets[d];
        for (std::uint64_t seed : cfg.seeds) {
            Dataset raw;
            try {
                raw = ds.case_tag ? generate_synthetic({*ds.case_tag, seed})
                                  : load_input(ds.csv, ds.label_col);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "dataset %s: %s\n", ds.name.c_str(), e.what());
                return kExitBadInput;
            }
            if (!raw.has_labels()) {
                std::fprintf(stderr, "dataset %s has no labels; bench needs ground truth\n",
                             ds.name.c_str());
                return kExitBadInput;
            }
            data[d].push_back(fit_scale(raw).second);
        }
    }

    std::vector<BenchCell> cells;
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
        for (const auto& m : cfg.methods)
            for (Algorithm a : cfg.algorithms) {
                BenchCell c;
                c.dataset = d;
                c.method = method_row_name(m, a);
                cells.push_back(std::move(c));
            }

    std::mutex log_mutex;
    std::size_t next = 0;
    std::mutex next_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= cells.size()) return;
                idx = next++;
            }
            BenchCell& cell = cells[idx];
            std::size_t d = cell.dataset;
            std::size_t flat = idx / cfg.algorithms.size() % cfg.methods.size();
            const std::string& method = cfg.methods[flat];
            Algorithm alg = cfg.algorithms[idx % cfg.algorithms.size()];
            double t0 = now_seconds();
            try {
                double sum = 0.0;
                for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
                    sum += bench_one(data[d][s], cfg.datasets[d], method, alg, cfg,
                                     cfg.seeds[s]);
                cell.ari = sum / cfg.seeds.size();
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cell.seconds = now_seconds() - t0;
            std::lock_guard<std::mutex> lock(log_mutex);
            std::printf("[%zu/%zu] %s / %s: %s (%.1fs)\n", idx + 1, cells.size(),
                        cfg.datasets[d].name.c_str(), cell.method.c_str(),
                        cell.ok ? "done" : cell.error.c_str(), cell.seconds);
            std::fflush(stdout);
        }
    };
    int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool any_ok = false;
    for (const auto& c : cells) any_ok |= c.ok;

    // Row order follows the methods x algorithms crossing; columns follow the
    // dataset list.
    std::vector<std::string> row_names;
    for (const auto& m : cfg.methods)
        for (Algorithm a : cfg.algorithms)
            row_names.push_back(method_row_name(m, a));
    const std::size_t ncols = cfg.datasets.size();
    const std::size_t per_dataset = cfg.methods.size() * cfg.algorithms.size();

    std::string csv_path = out_dir + "/ari_table.csv";
    std::FILE* f = std::fopen(csv_path.c_str(), "w");
    if (!f) {
        std::fprintf(stderr, "cannot open %s\n", csv_path.c_str());
        return kExitBadInput;
    }
    std::fprintf(f, "method");
    for (const auto& ds : cfg.datasets) std::fprintf(f, ",%s", ds.name.c_str());
    std::fprintf(f, "\n");
    for (std::size_t r = 0; r < row_names.size(); ++r) {
        std::fprintf(f, "%s", row_names[r].c_str());
        for (std::size_t dcol = 0; dcol < ncols; ++dcol) {
            const BenchCell& c = cells[dcol * per_dataset + r];
            if (c.ok)
                std::fprintf(f, ",%.17g", c.ari);
            else
                std::fprintf(f, ",NA");
        }
        std::fprintf(f, "\n");
    }
    std::fclose(f);

    std::string txt_path = out_dir + "/ari_table.txt";
    f = std::fopen(txt_path.c_str(), "w");
    if (f) {
        std::size_t w0 = 6;
        for (const auto& r : row_names) w0 = std::max(w0, r.size());
        std::fprintf(f, "%-*s", (int)w0 + 2, "method");
        for (const auto& ds : cfg.datasets) std::fprintf(f, "%12s", ds.name.c_str());
        std::fprintf(f, "\n");
        for (std::size_t r = 0; r < row_names.size(); ++r) {
            std::fprintf(f, "%-*s", (int)w0 + 2, row_names[r].c_str());
            for (std::size_t dcol = 0; dcol < ncols; ++dcol) {
                const BenchCell& c = cells[dcol * per_dataset + r];
                if (c.ok)
                    std::fprintf(f, "%12.4f", c.ari);
                else
                    std::fprintf(f, "%12s", "NA");
            }
            std::fprintf(f, "\n");
        }
        std::fclose(f);
    }

    std::string cells_path = out_dir + "/cells.csv";
    f = std::fopen(cells_path.c_str(), "w");
    if (f) {
        std::fprintf(f, "dataset,method,seeds,ari,seconds,error\n");
        for (const auto& c : cells) {
            std::fprintf(f, "%s,%s,\"", cfg.datasets[c.dataset].name.c_str(),
                         c.method.c_str());
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
                std::fprintf(f, "%s%llu", s ? " " : "",
                             (unsigned long long)cfg.seeds[s]);
            if (c.ok)
                std::fprintf(f, "\",%.17g,%.17g,\n", c.ari, c.seconds);
            else
                std::fprintf(f, "\",NA,%.17g,%s\n", c.seconds, c.error.c_str());
        }
        std::fclose(f);
    }

    std::printf("wrote %s\n", csv_path.c_str());
    return any_ok ? 0 : kExitNumerical;
}

// ---- timing ----------------------------------------------------------------

int cmd_timing(const std::string& case_tag, const std::string& input,
               std::optional<std::size_t> label_col, std::uint64_t seed, int grid_size,
               const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Dataset raw;
    if (!case_tag.empty()) {
        auto tag = parse_case_tag(case_tag);
        if (!tag) {
            std::fprintf(stderr, "unknown case tag '%s'\n", case_tag.c_str());
            return kExitBadInput;
        }
        raw = generate_synthetic({*tag, seed});
    } else if (!input.empty()) {
        try {
            raw = load_input(input, label_col);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "%s\n", e.what());
            return kExitBadInput;
        }
    } else {
        std::fprintf(stderr, "timing needs --case or --in\n");
        return kExitBadInput;
    }
    auto [tf, data] = fit_scale(raw);
    PairWeights w = compute_weights(data.points, 0.1);
    SolverConfig cfg;

    double lmax;
    try {
        lmax = find_lambda_max(make_l0_collapse_probe(data.points, w, cfg));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitNumerical;
    }
    auto grid = build_lambda_grid(lmax, grid_size);

    std::FILE* per_lambda = std::fopen((out_dir + "/time_vs_lambda.csv").c_str(), "w");
    if (!per_lambda) {
        std::fprintf(stderr, "cannot write to %s\n", out_dir.c_str());
        return kExitBadInput;
    }
    std::fprintf(per_lambda, "lambda,seconds\n");
    std::map<double, std::pair<double, int>> by_alpha;
    bool wrote_trace = false;
    std::size_t failures = 0;
    for (double lambda : grid) {
        try {
            auto [z, trace] = solve_smooth_l0(data.points, w, lambda, cfg);
            (void)z;
            std::fprintf(per_lambda, "%.17g,%.17g\n", lambda, trace.total_seconds);
            append_trace_csv(out_dir + "/trace.csv", lambda, trace, !wrote_trace);
            wrote_trace = true;
            for (const StageRecord& st : trace.stages) {
                by_alpha[st.alpha].first += st.seconds;
                by_alpha[st.alpha].second += 1;
            }
        } catch (const std::exception& e) {
            std::fprintf(stderr, "lambda %.6g failed: %s\n", lambda, e.what());
            ++failures;
        }
    }
    std::fclose(per_lambda);
    if (failures == grid.size()) return kExitNumerical;

    std::FILE* per_alpha = std::fopen((out_dir + "/time_vs_alpha.csv").c_str(), "w");
    if (per_alpha) {
        std::fprintf(per_alpha, "alpha,mean_seconds\n");
        for (const auto& [alpha, acc] : by_alpha)
            std::fprintf(per_alpha, "%.17g,%.17g\n", alpha, acc.first / acc.second);
        std::fclose(per_alpha);
    }
    std::printf("wrote %s/time_vs_lambda.csv, trace.csv, time_vs_alpha.csv\n",
                out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"l0-regularized centroid filtering toolkit"};
    app.require_subcommand(1);

    // generate
    std::string gen_case = "i", gen_out = "dataset.csv";
    std::uint64_t gen_seed = 1;
    auto* gen = app.add_subcommand("generate", "write a synthetic labeled dataset CSV");
    gen->add_option("--case", gen_case, "case tag: i, ii, iii or iv");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output CSV path");

    // filter
    std::string fil_in, fil_method = "l0", fil_out = ".";
    int fil_grid = 150;
    double fil_lambda = 0.0;
    std::optional<std::size_t> fil_label;
    auto* fil = app.add_subcommand("filter",
                                   "solve the centroid filter over a lambda grid");
    fil->add_option("--in", fil_in, "input CSV")->required();
    fil->add_option("--label-col", fil_label, "label column index (excluded from features)");
    fil->add_option("--method", fil_method, "l0 or ridge");
    fil->add_option("--grid-size", fil_grid, "number of lambda grid points");
    auto* fil_lambda_opt =
        fil->add_option("--lambda", fil_lambda, "solve this single lambda instead");
    fil->add_option("--out", fil_out, "output directory");

    // cluster
    std::string clu_in, clu_alg = "SL", clu_method = "l0", clu_out = "partition.csv";
    int clu_k = 2, clu_grid = 150, clu_restarts = 100, clu_mult = 10;
    double clu_gamma = 0.1;
    std::uint64_t clu_seed = 1;
    std::optional<std::size_t> clu_label;
    auto* clu = app.add_subcommand("cluster", "filter, cluster and select lambda");
    clu->add_option("--in", clu_in, "input CSV")->required();
    clu->add_option("--label-col", clu_label, "label column index");
    clu->add_option("--algorithm", clu_alg, "SL, EMGM or KKM");
    clu->add_option("--k", clu_k, "number of clusters");
    clu->add_option("--method", clu_method, "none, l0, ridge or km");
    clu->add_option("--grid-size", clu_grid, "lambda grid size");
    clu->add_option("--restarts", clu_restarts, "restarts for EMGM/KKM/k-means");
    clu->add_option("--gamma", clu_gamma, "gaussian kernel coefficient");
    clu->add_option("--seed", clu_seed, "RNG seed");
    clu->add_option("--km-multiplier", clu_mult, "kbar = multiplier * k for method km");
    clu->add_option("--out", clu_out, "partition CSV path");

    // bench
    std::string ben_config, ben_out = ".";
    int ben_jobs = 0;
    auto* ben = app.add_subcommand("bench", "run the full methods x datasets matrix");
    ben->add_option("--config", ben_config, "bench config file")->required();
    ben->add_option("--out", ben_out, "output directory");
    ben->add_option("--jobs", ben_jobs, "parallel bench cells (overrides config)");

    // timing
    std::string tim_case, tim_in, tim_out = ".";
    int tim_grid = 150;
    std::uint64_t tim_seed = 1;
    std::optional<std::size_t> tim_label;
    auto* tim = app.add_subcommand("timing", "export solve-time data over the grid");
    tim->add_option("--case", tim_case, "synthetic case tag");
    tim->add_option("--in", tim_in, "input CSV (alternative to --case)");
    tim->add_option("--label-col", tim_label, "label column index");
    tim->add_option("--seed", tim_seed, "RNG seed");
    tim->add_option("--grid-size", tim_grid, "lambda grid size");
    tim->add_option("--out", tim_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    if (gen->parsed()) return cmd_generate(gen_case, gen_seed, gen_out);
    if (fil->parsed())
        return cmd_filter(fil_in, fil_label, fil_method, fil_grid, fil_lambda,
                          fil_lambda_opt->count() > 0, fil_out);
    if (clu->parsed())
        return cmd_cluster(clu_in, clu_label, clu_alg, clu_k, clu_method, clu_grid,
                           clu_restarts, clu_gamma, clu_seed, clu_mult, clu_out);
    if (ben->parsed()) return cmd_bench(ben_config, ben_out, ben_jobs);
    if (tim->parsed())
        return cmd_timing(tim_case, tim_in, tim_label, tim_seed, tim_grid, tim_out);
    return kExitBadInput;
}
