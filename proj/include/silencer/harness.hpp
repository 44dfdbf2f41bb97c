#ifndef SILENCER_HARNESS_HPP
#define SILENCER_HARNESS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "silencer/factorization.hpp"
#include "silencer/graph.hpp"
#include "silencer/noise.hpp"

namespace silencer {

enum class MethodKind { Nmf, Dnmf, Danmf, SilencerNmf, SilencerDanmf };

MethodKind method_from_name(const std::string& name);
std::string method_name(MethodKind kind);

struct MethodSpec {
    std::string name;  // unique within a config
    MethodKind kind = MethodKind::Danmf;
    LayerConfig layers;
    PaceSchedule sched;
    SolverOptions opts;
};

struct DatasetSpec {
    // Either file-backed ...
    std::string edge_path;
    std::string label_path;  // optional; without labels metrics fall back to Q
    // ... or generated.
    std::string generator;   // "er" | "ws" | "ba" | "" for file-backed
    int n = 0;
    double p_conn = 0.1;
    int k_neighbors = 10;
    double p_rewire = 0.5;
    int m_edges = 2;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    std::optional<NoiseSpec> noise;
    bool redraw_noise = true;  // fresh noise draw per repetition
    std::vector<MethodSpec> methods;
    int repetitions = 10;
    std::uint64_t base_seed = 0;
    std::string output_dir;
    bool dump_weights = false;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_string(const std::string& text);
    void validate() const;
};

struct RunResult {
    std::map<std::string, double> metrics;  // nmi/ari/f1 and/or modularity
    bool failed = false;
    std::string failure;
    double wall_seconds = 0.0;
};

struct ResultsTable {
    // per method -> per metric -> per-run values (failed runs excluded)
    std::map<std::string, std::map<std::string, std::vector<double>>> per_run;
    std::map<std::string, std::map<std::string, double>> mean;
    std::map<std::string, std::map<std::string, double>> stddev;
    std::map<std::string, std::vector<RunResult>> runs;
    std::vector<std::uint64_t> noise_seeds;
    std::vector<std::uint64_t> graph_hashes;  // perturbed adjacency, per rep
    std::string config_hash;
    double wall_seconds = 0.0;

    std::string to_json() const;
    std::string to_csv() const;
};

/// Runs every method on the same perturbed graph within each repetition,
/// scores against ground truth (or modularity), aggregates mean +- std, and
/// persists results.json / results.csv to the output dir (when set).
ResultsTable run_experiment(const ExperimentConfig& cfg);

/// Two-sided Mann-Whitney rank-sum p-value, normal approximation with tie
/// correction.
double ranksum_test(const std::vector<double>& a, const std::vector<double>& b);

/// (silencer_q - baseline_q) / baseline_q.
double improvement_ratio(double silencer_q, double baseline_q);

/// FNV-1a over the adjacency bytes; provenance for "same graph per rep".
std::uint64_t graph_hash(const Graph& g);

}  // namespace silencer

#endif
