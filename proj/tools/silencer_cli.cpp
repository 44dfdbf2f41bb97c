// Command-line front end: generate / perturb / detect / evaluate / experiment.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "silencer/errors.hpp"
#include "silencer/factorization.hpp"
#include "silencer/graph.hpp"
#include "silencer/harness.hpp"
#include "silencer/metrics.hpp"
#include "silencer/noise.hpp"

using namespace silencer;
using nlohmann::json;

namespace {

LayerConfig parse_layers(const std::string& text) {
    LayerConfig cfg;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.sizes.push_back(std::stoi(tok));
    return cfg;
}

json record_to_json(const PerturbationRecord& rec) {
    json j;
    j["removed"] = json::array();
    j["added"] = json::array();
    for (auto [u, v] : rec.removed) j["removed"].push_back({u, v});
    for (auto [u, v] : rec.added) j["added"].push_back({u, v});
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-paced pixel-weighted NMF community detection"};
    app.require_subcommand(1);
    app.fallthrough();  // allow the global --seed/--out/--threads after a subcommand

    std::uint64_t seed = 0;
    std::string out_path;
    int threads = 1;
    app.add_option("--seed", seed, "global RNG seed");
    app.add_option("--out", out_path, "output path");
    app.add_option("--threads", threads, "worker threads (matrix kernels)");

    // generate
    auto* gen = app.add_subcommand("generate", "synthesize an ER/WS/BA graph");
    std::string model = "er";
    int gen_n = 1000, k_neighbors = 10, m_edges = 2;
    double p_conn = 0.1, p_rewire = 0.5;
    gen->add_option("--model", model, "er|ws|ba")->required();
    gen->add_option("--n", gen_n, "node count");
    gen->add_option("--p-conn", p_conn, "ER connection probability");
    gen->add_option("--k-neighbors", k_neighbors, "WS lattice neighbors (even)");
    gen->add_option("--p-rewire", p_rewire, "WS rewiring probability");
    gen->add_option("--m-edges", m_edges, "BA edges per new node");

    // perturb
    auto* pert = app.add_subcommand("perturb", "apply noise to a graph");
    std::string pert_kind = "random", pert_in, base_kind;
    double flip_p = 0.01, budget = 0.05;
    int rank = 2;
    pert->add_option("--kind", pert_kind, "random|qattack|mixed")->required();
    pert->add_option("--in", pert_in, "input edge list")->required();
    pert->add_option("--p", flip_p, "flip probability (random)");
    pert->add_option("--budget", budget, "attack budget fraction (qattack)");
    pert->add_option("--rank", rank, "NMF rank (mixed)");
    pert->add_option("--base", base_kind, "pre-noise for mixed: random|qattack");

    // detect
    auto* det = app.add_subcommand("detect", "run one method on one graph");
    std::string method = "danmf", det_in, layers_text, matrix_in;
    double lambda = 0.01, eta = 2.0;
    int m_rounds = 20;
    det->add_option("--method", method, "nmf|dnmf|danmf|silencer-nmf|silencer-danmf");
    det->add_option("--in", det_in, "input edge list");
    det->add_option("--matrix", matrix_in, "input dense CSV matrix (mixed-noise output)");
    det->add_option("--layers", layers_text, "comma-separated layer sizes, e.g. 34,16,2")->required();
    det->add_option("--lambda", lambda, "graph regularization weight");
    det->add_option("--eta", eta, "pace step multiplier");
    det->add_option("--m", m_rounds, "outer self-paced rounds");
    bool dump_weights = false;
    det->add_flag("--dump-weights", dump_weights, "write the final weight matrix as CSV");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score predicted labels");
    std::string pred_path, truth_path, eval_graph;
    eval->add_option("--pred", pred_path, "predicted labels")->required();
    eval->add_option("--truth", truth_path, "ground-truth labels")->required();
    eval->add_option("--graph", eval_graph, "edge list, adds modularity");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a full experiment config");
    std::string config_path;
    exp->add_option("--config", config_path, "JSON experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Graph g;
            if (model == "er")
                g = generate_er(gen_n, p_conn, seed);
            else if (model == "ws")
                g = generate_ws(gen_n, k_neighbors, p_rewire, seed);
            else if (model == "ba")
                g = generate_ba(gen_n, m_edges, seed);
            else
                throw ValidationError("unknown model: " + model);
            if (out_path.empty()) throw ValidationError("generate: --out required");
            save_edge_list(g, out_path);
        } else if (pert->parsed()) {
            Graph g = load_edge_list(pert_in);
            if (out_path.empty()) throw ValidationError("perturb: --out required");
            PerturbationRecord rec;
            Graph noisy;
            if (pert_kind == "random") {
                noisy = perturb_random(g, flip_p, seed, &rec);
                save_edge_list(noisy, out_path);
            } else if (pert_kind == "qattack") {
                noisy = qattack(g, budget, GaParams{}, seed, &rec);
                save_edge_list(noisy, out_path);
            } else if (pert_kind == "mixed") {
                std::shared_ptr<NoiseSpec> base;
                if (base_kind == "random")
                    base = std::make_shared<NoiseSpec>(NoiseSpec::random(flip_p, seed));
                else if (base_kind == "qattack")
                    base = std::make_shared<NoiseSpec>(NoiseSpec::qattack(budget, GaParams{}, seed));
                else if (!base_kind.empty())
                    throw ValidationError("unknown base noise: " + base_kind);
                noisy = perturb_mixed(g, base.get(), rank, seed, &rec);
                save_matrix_csv(noisy.adjacency, out_path);
            } else {
                throw ValidationError("unknown noise kind: " + pert_kind);
            }
            std::ofstream(out_path + ".prov.json") << record_to_json(rec).dump(2) << '\n';
        } else if (det->parsed()) {
            Graph g;
            if (!matrix_in.empty()) {
                g.adjacency = load_matrix_csv(matrix_in);
                g.symmetric = false;
                g.binary = false;
            } else if (!det_in.empty()) {
                g = load_edge_list(det_in);
            } else {
                throw ValidationError("detect: --in or --matrix required");
            }
            LayerConfig layers = parse_layers(layers_text);
            SolverOptions opts;
            opts.lambda = lambda;
            opts.seed = seed;
            PaceSchedule sched;
            sched.eta = eta;
            sched.outer_iters = m_rounds;

            Partition part;
            Eigen::MatrixXd weights;
            bool has_weights = false;
            MethodKind kind = method_from_name(method);
            switch (kind) {
                case MethodKind::Nmf: {
                    auto [pair, rep] = nmf_fit(g, layers.rank(), opts);
                    part = assign_communities(pair);
                    break;
                }
                case MethodKind::SilencerNmf: {
                    auto [pair, w, rep] = silencer_nmf_fit(g, layers.rank(), sched, opts);
                    part = assign_communities(pair);
                    weights = w;
                    has_weights = true;
                    break;
                }
                case MethodKind::Dnmf: {
                    auto [stack, rep] = dnmf_fit(g, layers, opts);
                    part = assign_communities(stack);
                    break;
                }
                case MethodKind::Danmf: {
                    auto [stack, rep] = danmf_fit(g, layers, opts);
                    part = assign_communities(stack);
                    break;
                }
                case MethodKind::SilencerDanmf: {
                    auto [stack, w, rep] = silencer_danmf_fit(g, layers, sched, opts);
                    part = assign_communities(stack);
                    weights = w;
                    has_weights = true;
                    break;
                }
            }
            if (out_path.empty()) throw ValidationError("detect: --out required");
            save_labels(part, out_path);
            if (dump_weights && has_weights) save_matrix_csv(weights, out_path + ".weights.csv");
        } else if (eval->parsed()) {
            // Node count: infer from the longer of the two files.
            auto count_lines = [](const std::string& p) {
                std::ifstream in(p);
                int c = 0;
                std::string line;
                while (std::getline(in, line))
                    if (!line.empty() && line[0] != '#') ++c;
                return c;
            };
            int n = std::max(count_lines(pred_path), count_lines(truth_path));
            Partition pred = load_labels(pred_path, n);
            Partition truth = load_labels(truth_path, n);
            json j;
            j["nmi"] = nmi(pred, truth);
            j["ari"] = ari(pred, truth);
            j["f1"] = pairwise_f1(pred, truth);
            if (!eval_graph.empty()) {
                Graph g = load_edge_list(eval_graph, n);
                j["modularity"] = modularity(g, pred);
            }
            if (out_path.empty())
                std::cout << j.dump(2) << std::endl;
            else
                std::ofstream(out_path) << j.dump(2) << '\n';
        } else if (exp->parsed()) {
            ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
            if (!out_path.empty()) cfg.output_dir = out_path;
            ResultsTable table = run_experiment(cfg);
            std::cout << table.to_csv();
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
