#include "silencer/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "silencer/errors.hpp"
#include "silencer/metrics.hpp"
#include "silencer/random.hpp"

namespace silencer {

using nlohmann::json;

MethodKind method_from_name(const std::string& name) {
    if (name == "nmf") return MethodKind::Nmf;
    if (name == "dnmf") return MethodKind::Dnmf;
    if (name == "danmf") return MethodKind::Danmf;
    if (name == "silencer-nmf") return MethodKind::SilencerNmf;
    if (name == "silencer-danmf") return MethodKind::SilencerDanmf;
    throw ValidationError("unknown method: " + name);
}

std::string method_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::Nmf: return "nmf";
        case MethodKind::Dnmf: return "dnmf";
        case MethodKind::Danmf: return "danmf";
        case MethodKind::SilencerNmf: return "silencer-nmf";
        case MethodKind::SilencerDanmf: return "silencer-danmf";
    }
    return "?";
}

namespace {

NoiseSpec noise_from_json(const json& j) {
    std::string kind = j.at("kind");
    NoiseSpec spec;
    spec.seed = j.value("seed", 0ull);
    if (kind == "random") {
        spec.kind = NoiseSpec::Kind::Random;
        spec.p = j.at("p");
    } else if (kind == "qattack") {
        spec.kind = NoiseSpec::Kind::QAttack;
        spec.budget_fraction = j.value("budget", 0.05);
        if (j.contains("ga")) {
            const auto& g = j["ga"];
            spec.ga.population_size = g.value("population_size", spec.ga.population_size);
            spec.ga.generations = g.value("generations", spec.ga.generations);
            spec.ga.crossover_rate = g.value("crossover_rate", spec.ga.crossover_rate);
            spec.ga.mutation_rate = g.value("mutation_rate", spec.ga.mutation_rate);
            spec.ga.elite_count = g.value("elite_count", spec.ga.elite_count);
        }
    } else if (kind == "mixed") {
        spec.kind = NoiseSpec::Kind::Mixed;
        spec.rank = j.at("rank");
        if (j.contains("base") && !j["base"].is_null())
            spec.base = std::make_shared<NoiseSpec>(noise_from_json(j["base"]));
    } else {
        throw ValidationError("unknown noise kind: " + kind);
    }
    return spec;
}

MethodSpec method_from_json(const json& j, int n) {
    MethodSpec m;
    m.name = j.at("name");
    m.kind = method_from_name(m.name);
    if (j.contains("layers")) {
        m.layers.sizes = j["layers"].get<std::vector<int>>();
    } else {
        m.layers.sizes = {n, std::max(2, n / 4), 2};
    }
    m.opts.lambda = j.value("lambda", m.opts.lambda);
    m.opts.max_inner_iters = j.value("max_inner_iters", m.opts.max_inner_iters);
    m.opts.max_pretrain_iters = j.value("max_pretrain_iters", m.opts.max_pretrain_iters);
    m.opts.tol = j.value("tol", m.opts.tol);
    m.sched.eta = j.value("eta", m.sched.eta);
    m.sched.outer_iters = j.value("m", m.sched.outer_iters);
    if (j.contains("gamma0")) m.sched.gamma0 = j["gamma0"].get<double>();
    return m;
}

Graph resolve_dataset(const DatasetSpec& d, Partition* truth, bool* has_truth) {
    *has_truth = false;
    if (d.generator.empty()) {
        Graph g = load_edge_list(d.edge_path, d.n > 0 ? std::optional<int>(d.n) : std::nullopt);
        if (!d.label_path.empty()) {
            *truth = load_labels(d.label_path, g.n());
            *has_truth = true;
        }
        return g;
    }
    if (d.generator == "er") return generate_er(d.n, d.p_conn, 0);
    if (d.generator == "ws") return generate_ws(d.n, d.k_neighbors, d.p_rewire, 0);
    if (d.generator == "ba") return generate_ba(d.n, d.m_edges, 0);
    throw ValidationError("unknown generator: " + d.generator);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig cfg;
    const auto& d = j.at("dataset");
    if (d.contains("generator")) {
        cfg.dataset.generator = d["generator"];
        cfg.dataset.n = d.at("n");
        cfg.dataset.p_conn = d.value("p_conn", cfg.dataset.p_conn);
        cfg.dataset.k_neighbors = d.value("k_neighbors", cfg.dataset.k_neighbors);
        cfg.dataset.p_rewire = d.value("p_rewire", cfg.dataset.p_rewire);
        cfg.dataset.m_edges = d.value("m_edges", cfg.dataset.m_edges);
    } else {
        cfg.dataset.edge_path = d.at("edges");
        cfg.dataset.label_path = d.value("labels", std::string());
        cfg.dataset.n = d.value("n", 0);
    }
    if (j.contains("noise") && !j["noise"].is_null()) cfg.noise = noise_from_json(j["noise"]);
    cfg.redraw_noise = j.value("redraw_noise", true);
    cfg.repetitions = j.value("repetitions", 10);
    cfg.base_seed = j.value("base_seed", 0ull);
    cfg.output_dir = j.value("output_dir", std::string());
    cfg.dump_weights = j.value("dump_weights", false);

    int n = cfg.dataset.n;
    bool need_n = false;
    for (const auto& mj : j.at("methods"))
        if (!mj.contains("layers")) need_n = true;
    if (need_n && n == 0) {
        bool has_truth = false;
        Partition truth;
        n = resolve_dataset(cfg.dataset, &truth, &has_truth).n();
    }
    for (const auto& mj : j.at("methods")) cfg.methods.push_back(method_from_json(mj, n));
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ValidationError("config: repetitions must be >= 1");
    if (methods.empty()) throw ValidationError("config: no methods given");
    std::set<std::string> names;
    for (const auto& m : methods)
        if (!names.insert(m.name).second)
            throw ValidationError("config: duplicate method name " + m.name);
}

std::uint64_t graph_hash(const Graph& g) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(g.adjacency.data());
    const size_t len = sizeof(double) * static_cast<size_t>(g.adjacency.size());
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

struct MethodOutput {
    Partition part;
    Eigen::MatrixXd weights;
    bool has_weights = false;
};

MethodOutput run_method(const Graph& g, const MethodSpec& m, std::uint64_t seed) {
    SolverOptions opts = m.opts;
    opts.seed = seed;
    MethodOutput out;
    switch (m.kind) {
        case MethodKind::Nmf: {
            auto [pair, rep] = nmf_fit(g, m.layers.rank(), opts);
            out.part = assign_communities(pair);
            break;
        }
        case MethodKind::SilencerNmf: {
            auto [pair, w, rep] = silencer_nmf_fit(g, m.layers.rank(), m.sched, opts);
            out.part = assign_communities(pair);
            out.weights = w;
            out.has_weights = true;
            break;
        }
        case MethodKind::Dnmf: {
            auto [stack, rep] = dnmf_fit(g, m.layers, opts);
            out.part = assign_communities(stack);
            break;
        }
        case MethodKind::Danmf: {
            auto [stack, rep] = danmf_fit(g, m.layers, opts);
            out.part = assign_communities(stack);
            break;
        }
        case MethodKind::SilencerDanmf: {
            auto [stack, w, rep] = silencer_danmf_fit(g, m.layers, m.sched, opts);
            out.part = assign_communities(stack);
            out.weights = w;
            out.has_weights = true;
            break;
        }
    }
    return out;
}

double population_std(const std::vector<double>& xs, double mean) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / xs.size());
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();

    bool has_truth = false;
    Partition truth;
    Graph clean = resolve_dataset(cfg.dataset, &truth, &has_truth);

    ResultsTable table;
    if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);

    Graph frozen_noisy;
    bool frozen_ready = false;

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        std::uint64_t rep_seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
        std::uint64_t noise_seed = derive_seed(cfg.base_seed, rep, 0xA0);
        table.noise_seeds.push_back(noise_seed);

        Graph working = clean;
        if (cfg.noise) {
            if (cfg.redraw_noise) {
                working = apply_noise(clean, *cfg.noise, noise_seed);
            } else {
                if (!frozen_ready) {
                    frozen_noisy =
                        apply_noise(clean, *cfg.noise, derive_seed(cfg.base_seed, 0, 0xA0));
                    frozen_ready = true;
                }
                working = frozen_noisy;
            }
        }
        table.graph_hashes.push_back(graph_hash(working));
        if (!cfg.output_dir.empty() && cfg.noise && working.binary)
            save_edge_list(working, cfg.output_dir + "/perturbed_" + std::to_string(rep) + ".edges");

        for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            const auto& m = cfg.methods[mi];
            RunResult run;
            auto m0 = std::chrono::steady_clock::now();
            try {
                std::uint64_t solver_seed = derive_seed(cfg.base_seed, rep_seed, mi + 1);
                MethodOutput out = run_method(working, m, solver_seed);
                if (has_truth) {
                    run.metrics["nmi"] = nmi(out.part, truth);
                    run.metrics["ari"] = ari(out.part, truth);
                    run.metrics["f1"] = pairwise_f1(out.part, truth);
                }
                if (clean.binary && clean.symmetric && clean.edge_count() > 0)
                    run.metrics["modularity"] = modularity(clean, out.part);
                if (cfg.dump_weights && out.has_weights && !cfg.output_dir.empty())
                    save_matrix_csv(out.weights, cfg.output_dir + "/weights_" + m.name + "_" +
                                                     std::to_string(rep) + ".csv");
            } catch (const NumericalError& e) {
                run.failed = true;
                run.failure = e.what();
            }
            run.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - m0).count();
            if (!run.failed)
                for (const auto& [metric, value] : run.metrics)
                    table.per_run[m.name][metric].push_back(value);
            table.runs[m.name].push_back(std::move(run));
        }
    }

    for (const auto& [mname, metrics] : table.per_run)
        for (const auto& [metric, values] : metrics) {
            double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
            table.mean[mname][metric] = mean;
            table.stddev[mname][metric] = population_std(values, mean);
        }

    table.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!cfg.output_dir.empty()) {
        std::ofstream(cfg.output_dir + "/results.json") << table.to_json();
        std::ofstream(cfg.output_dir + "/results.csv") << table.to_csv();
    }
    return table;
}

std::string ResultsTable::to_json() const {
    json j;
    j["noise_seeds"] = noise_seeds;
    j["graph_hashes"] = graph_hashes;
    for (const auto& [mname, metrics] : per_run) {
        json jm;
        for (const auto& [metric, values] : metrics) {
            jm[metric]["values"] = values;
            jm[metric]["mean"] = mean.at(mname).at(metric);
            jm[metric]["std"] = stddev.at(mname).at(metric);
        }
        int failures = 0;
        for (const auto& r : runs.at(mname)) failures += r.failed ? 1 : 0;
        jm["failed_runs"] = failures;
        j["methods"][mname] = jm;
    }
    // failure details even when a method never produced metrics
    for (const auto& [mname, rs] : runs) {
        json fails = json::array();
        for (size_t i = 0; i < rs.size(); ++i)
            if (rs[i].failed) fails.push_back({{"rep", i}, {"error", rs[i].failure}});
        if (!fails.empty()) j["methods"][mname]["failures"] = fails;
    }
    return j.dump(2);
}

std::string ResultsTable::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "method,metric,mean,std,n_runs\n";
    for (const auto& [mname, metrics] : per_run)
        for (const auto& [metric, values] : metrics)
            out << mname << ',' << metric << ',' << mean.at(mname).at(metric) << ','
                << stddev.at(mname).at(metric) << ',' << values.size() << '\n';
    return out.str();
}

double ranksum_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ValidationError("ranksum: empty sample");
    const size_t n1 = a.size(), n2 = b.size();
    std::vector<std::pair<double, int>> pooled;  // value, group
    for (double x : a) pooled.emplace_back(x, 0);
    for (double x : b) pooled.emplace_back(x, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });

    // Midranks with tie correction.
    const size_t n = pooled.size();
    std::vector<double> rank(n);
    double tie_term = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
        double mid = 0.5 * (i + j) + 1.0;
        for (size_t t = i; t <= j; ++t) rank[t] = mid;
        double ties = static_cast<double>(j - i + 1);
        tie_term += ties * ties * ties - ties;
        i = j + 1;
    }

    double r1 = 0.0;
    for (size_t t = 0; t < n; ++t)
        if (pooled[t].second == 0) r1 += rank[t];
    double u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    double mu = n1 * static_cast<double>(n2) / 2.0;
    double sigma2 = n1 * static_cast<double>(n2) / 12.0 *
                    (n + 1.0 - tie_term / (static_cast<double>(n) * (n - 1.0)));
    if (sigma2 <= 0.0) return 1.0;  // all values tied
    double z = (std::abs(u1 - mu) - 0.5) / std::sqrt(sigma2);  // continuity correction
    if (z < 0.0) z = 0.0;
    return std::erfc(z / std::sqrt(2.0));
}

double improvement_ratio(double silencer_q, double baseline_q) {
    if (baseline_q == 0.0) throw ValidationError("improvement_ratio: baseline is zero");
    return (silencer_q - baseline_q) / baseline_q;
}

}  // namespace silencer
