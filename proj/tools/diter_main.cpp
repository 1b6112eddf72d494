// Command-line driver: graph generation, sequential solve, distributed
// simulation, and the cycle-cost benchmark grid. Every command is
// reproducible from (config, seed): re-running writes byte-identical CSVs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diter/bench.hpp"
#include "diter/engine.hpp"
#include "diter/gen.hpp"
#include "diter/sim.hpp"

namespace {

using namespace diter;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Strategy parse_strategy(const std::string& s) {
    if (s == "cyc") return Strategy::cyc();
    if (s == "max") return Strategy::max();
    if (s == "cost") return Strategy::cost();
    if (s.rfind("seq:", 0) == 0) {
        std::vector<csint> seq;
        std::stringstream ss(s.substr(4));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) seq.push_back(std::stoll(tok));
        }
        if (seq.empty()) throw CLI::ValidationError("--strategy", "empty seq: list");
        return Strategy::explicit_seq(std::move(seq));
    }
    throw CLI::ValidationError("--strategy", "expected cyc|max|cost|seq:<i,j,...>");
}

DiffusionMode parse_mode(const std::string& s) {
    if (s == "all") return DiffusionMode::All;
    if (s == "neg") return DiffusionMode::NegativeOnly;
    if (s == "pos") return DiffusionMode::PositiveOnly;
    throw CLI::ValidationError("--mode", "expected all|neg|pos");
}

struct Problem {
    CscMatrix m;
    DenseVector b;
    DenseVector x0;
};

Problem build_problem(const EdgeList& graph, const std::string& kind, double d) {
    Problem pr;
    const CscMatrix adjacency = adjacency_matrix(graph);
    if (kind == "raw") {
        // X = P X + 1 with the file's weights taken verbatim
        pr.m = adjacency;
        pr.b.assign(static_cast<std::size_t>(pr.m.n), 1.0);
        pr.x0.assign(static_cast<std::size_t>(pr.m.n), 0.0);
    } else if (kind == "pagerank") {
        auto system = pagerank_system(adjacency, d);
        pr.m = std::move(system.first);
        pr.b = std::move(system.second);
        pr.x0.assign(static_cast<std::size_t>(pr.m.n), 0.0);
    } else if (kind == "rho1") {
        pr.m = adjacency;
        for (csint j = 0; j < pr.m.n; ++j) {
            double colsum = 0.0;
            for (csint t = pr.m.col_ptr[j]; t < pr.m.col_ptr[j + 1]; ++t) colsum += pr.m.values[t];
            if (colsum == 0.0) continue;
            for (csint t = pr.m.col_ptr[j]; t < pr.m.col_ptr[j + 1]; ++t) pr.m.values[t] /= colsum;
        }
        pr.b = rho1_seed(pr.m);
        pr.x0.assign(static_cast<std::size_t>(pr.m.n),
                     pr.m.n > 0 ? 1.0 / static_cast<double>(pr.m.n) : 0.0);
    } else {
        throw CLI::ValidationError("--problem", "expected pagerank|rho1|raw");
    }
    return pr;
}

// Flat key=value configuration: each key names a long option of the invoked
// subcommand; values act as defaults, so explicit flags win.
void apply_config_defaults(CLI::App* sub, int argc, char** argv) {
    std::string path;
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto notspace = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        value.erase(value.begin(), std::find_if(value.begin(), value.end(), notspace));
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown option '" + key + "'");
        }
        opt->default_val(value);
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

void write_solution_csv(const std::string& path, const DenseVector& h) {
    auto out = open_out(path);
    out << "node,h\n";
    for (std::size_t i = 0; i < h.size(); ++i) out << i << ',' << fmt17(h[i]) << '\n';
}

void write_history_csv(const std::string& path, const std::vector<ResidualSample>& hist) {
    auto out = open_out(path);
    out << "diffusions,link_ops,residual\n";
    for (const auto& s : hist) {
        out << s.diffusions << ',' << s.link_ops << ',' << fmt17(s.residual) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diter: diffusion-based sparse linear solver and benchmark harness"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a test graph as an edge list");
    std::string gen_kind = "uniform";
    csint gen_n = 128, gen_links = 1652;
    double gen_exponent = 2.1;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "graph.txt";
    std::string gen_cfg;
    gen->add_option("--config", gen_cfg, "flat key=value configuration file");
    gen->add_option("kind", gen_kind, "uniform|powerlaw")->required();
    gen->add_option("n", gen_n, "node count")->required();
    gen->add_option("links", gen_links, "directed link target (uniform)");
    gen->add_option("--exponent", gen_exponent, "power-law exponent");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output edge-list path");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "run the diffusion solver on a graph");
    std::string so_graph, so_problem = "pagerank", so_strategy = "cost", so_mode;
    std::string so_out = "solve";
    double so_d = 0.85, so_epsilon = 1e-9;
    std::int64_t so_budget = std::int64_t{1} << 40;
    std::optional<csint> so_first;
    std::string so_cfg;
    solve->add_option("--config", so_cfg, "flat key=value configuration file");
    solve->add_option("--graph", so_graph, "edge-list file");
    solve->add_option("--problem", so_problem, "pagerank|rho1|raw");
    solve->add_option("--d", so_d, "damping factor");
    solve->add_option("--epsilon", so_epsilon, "relative residual target");
    solve->add_option("--strategy", so_strategy, "cyc|max|cost|seq:<list>");
    solve->add_option("--mode", so_mode, "all|neg|pos (default: all, neg for rho1)");
    solve->add_option("--budget", so_budget, "link-operation budget");
    solve->add_option("--first", so_first, "induced subgraph on the first N nodes");
    solve->add_option("--out", so_out, "output prefix");

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "cycle-cost comparison grid");
    BenchConfig bc;
    std::string be_problem = "pagerank";
    std::string be_out = "bench";
    std::string be_methods = "sPI-R,aPI-R,sPI-C,sPI-Cr,DI+COST";
    std::string be_klist = "1,2,4,8,16,32,64,128";
    std::string be_cfg;
    bench->add_option("--config", be_cfg, "flat key=value configuration file");
    bench->add_option("--graph", bc.graph_path, "edge-list file (default: generate)");
    bench->add_option("--n", bc.n, "generated node count");
    bench->add_option("--links", bc.links, "generated link target");
    bench->add_option("--seed", bc.seed, "graph + delay seed");
    bench->add_option("--d", bc.d, "damping factor");
    bench->add_option("--epsilon", bc.epsilon, "residual target");
    bench->add_option("--problem", be_problem, "pagerank|rho1");
    bench->add_option("--methods", be_methods, "comma list of methods");
    bench->add_option("--k", be_klist, "comma list of processor counts");
    bench->add_option("--tr", bc.cost.t_r, "shared-read cycles");
    bench->add_option("--tw", bc.cost.t_w, "shared-write cycles");
    bench->add_option("--tm", bc.cost.t_m, "multiplication cycles");
    bench->add_option("--ta", bc.cost.t_a, "addition cycles");
    bench->add_option("--exchange-period", bc.exchange_period, "diffusions between sends");
    bench->add_option("--delay-bound", bc.delay_bound, "message delay bound (cycles)");
    bench->add_option("--out", be_out, "output prefix");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "distributed diffusion simulation");
    std::string si_graph, si_problem = "pagerank", si_strategy = "cost", si_mode;
    std::string si_out = "sim", si_speed;
    double si_d = 0.85, si_epsilon = 1e-9;
    csint si_k = 2;
    SimConfig sc;
    bool si_rebalance = false;
    std::string si_cfg;
    sim->add_option("--config", si_cfg, "flat key=value configuration file");
    sim->add_option("--graph", si_graph, "edge-list file");
    sim->add_option("--problem", si_problem, "pagerank|rho1");
    sim->add_option("--d", si_d, "damping factor");
    sim->add_option("--epsilon", si_epsilon, "relative residual target");
    sim->add_option("--strategy", si_strategy, "cyc|max|cost|seq:<list>");
    sim->add_option("--mode", si_mode, "all|neg|pos (default: all, neg for rho1)");
    sim->add_option("--k", si_k, "processor count");
    sim->add_option("--delay-bound", sc.delay_bound, "message delay bound (cycles)");
    sim->add_option("--exchange-period", sc.exchange_period, "diffusions between sends");
    sim->add_option("--seed", sc.seed, "delay seed");
    sim->add_option("--tr", sc.cost.t_r, "shared-read cycles");
    sim->add_option("--tw", sc.cost.t_w, "shared-write cycles");
    sim->add_option("--tm", sc.cost.t_m, "multiplication cycles");
    sim->add_option("--ta", sc.cost.t_a, "addition cycles");
    sim->add_flag("--rebalance", si_rebalance, "enable dynamic repartitioning");
    sim->add_option("--rebalance-window", sc.rebalance.window, "observation window (diffusions)");
    sim->add_option("--speed-mult", si_speed, "per-pid cycle multipliers, e.g. 4,1,1,1");
    sim->add_option("--out", si_out, "output prefix");

    if (argc > 1) {
        try {
            CLI::App* invoked = app.get_subcommand_no_throw(argv[1]);
            if (invoked != nullptr) apply_config_defaults(invoked, argc, argv);
        } catch (const std::exception& err) {
            std::cerr << "error: " << err.what() << "\n";
            return 1;
        }
    }
    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            EdgeList e;
            if (gen_kind == "uniform") {
                e = uniform_random_graph(gen_n, gen_links, gen_seed);
            } else if (gen_kind == "powerlaw") {
                e = power_law_graph(gen_n, gen_exponent, gen_seed);
            } else {
                std::cerr << "gen: unknown kind '" << gen_kind << "'\n";
                return 1;
            }
            write_edge_list(gen_out, e);
            const DegreeStats dir = degree_stats(e, false);
            const DegreeStats und = degree_stats(e, true);
            std::cout << "wrote " << gen_out << ": n=" << e.n << " links=" << e.edges.size()
                      << "\ndegrees directed: mean=" << fmt17(dir.mean)
                      << " sd=" << fmt17(dir.stddev) << " min=" << dir.min
                      << " max=" << dir.max
                      << "\ndegrees undirected (self-loops once): mean=" << fmt17(und.mean)
                      << " sd=" << fmt17(und.stddev) << " min=" << und.min
                      << " max=" << und.max << "\n";
            return 0;
        }

        if (*solve) {
            if (so_graph.empty()) {
                std::cerr << "solve: --graph is required (flag or config)\n";
                return 1;
            }
            const EdgeList graph = read_edge_list(so_graph, so_first);
            const Problem pr = build_problem(graph, so_problem, so_d);
            if (so_mode.empty()) so_mode = so_problem == "rho1" ? "neg" : "all";
            const Solution sol = run(pr.m, pr.b, parse_strategy(so_strategy),
                                     parse_mode(so_mode), so_epsilon, so_budget);
            write_solution_csv(so_out + ".solution.csv", sol.h);
            write_history_csv(so_out + ".history.csv", sol.residual_history);
            std::cout << (sol.converged ? "converged" : "NOT converged")
                      << ": residual=" << fmt17(sol.residual_l1)
                      << " diffusions=" << sol.diffusion_count
                      << " link_ops=" << sol.link_ops << "\n";
            if (!sol.converged) {
                std::cerr << "solve: no convergence within budget; partial solution written\n";
                return 2;
            }
            return 0;
        }

        if (*bench) {
            bc.problem = be_problem == "rho1" ? BenchProblem::Rho1 : BenchProblem::PageRank;
            bc.methods.clear();
            {
                std::stringstream ss(be_methods);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (!tok.empty()) bc.methods.push_back(tok);
                }
            }
            bc.k_list.clear();
            {
                std::stringstream ss(be_klist);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (!tok.empty()) bc.k_list.push_back(std::stoll(tok));
                }
            }
            const BenchReport report = run_bench(bc);
            {
                auto out = open_out(be_out + ".bench.csv");
                write_bench_csv(out, report);
            }
            {
                auto out = open_out(be_out + ".ledger.csv");
                write_bench_ledger_csv(out, report);
            }
            std::cout << "sPI-R K=1 makespan: " << report.spi_r_k1_makespan << "\n";
            for (const BenchRow& row : report.rows) {
                std::cout << row.method << " K=" << row.k << ": makespan=" << row.makespan
                          << " speed=" << fmt17(row.normalized_speed)
                          << (row.converged ? "" : " (NOT converged)") << "\n";
            }
            for (const std::string& note : report.notes) std::cout << "note: " << note << "\n";
            return 0;
        }

        if (*sim) {
            if (si_graph.empty()) {
                std::cerr << "simulate: --graph is required (flag or config)\n";
                return 1;
            }
            const EdgeList graph = read_edge_list(si_graph);
            const Problem pr = build_problem(graph, si_problem, si_d);
            if (si_mode.empty()) si_mode = si_problem == "rho1" ? "neg" : "all";
            sc.k = si_k;
            sc.epsilon = si_epsilon;
            sc.rebalance.enabled = si_rebalance;
            if (!si_speed.empty()) {
                std::stringstream ss(si_speed);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (!tok.empty()) sc.speed.push_back(std::stod(tok));
                }
            }
            const Partition part = partition_uniform(pr.m.n, si_k);
            const SimResult res = simulate(pr.m, pr.b, part, parse_strategy(si_strategy),
                                           parse_mode(si_mode), sc);
            write_solution_csv(si_out + ".solution.csv", res.h);
            {
                auto out = open_out(si_out + ".exchange.csv");
                out << "event,clock,src,dst,mass,send_clock,deliver_clock\n";
                for (const ExchangeEvent& ev : res.exchange_log) {
                    out << ev.event << ',' << ev.clock << ',' << ev.src << ',' << ev.dst
                        << ',' << fmt17(ev.mass) << ',' << ev.send_clock << ','
                        << ev.deliver_clock << '\n';
                }
            }
            {
                auto out = open_out(si_out + ".residual.csv");
                out << "clock,global_residual\n";
                for (const ClockSample& s : res.residual_history) {
                    out << s.clock << ',' << fmt17(s.residual) << '\n';
                }
            }
            std::cout << (res.converged ? "converged" : "NOT converged")
                      << ": makespan=" << res.makespan << " residual=" << fmt17(res.residual)
                      << " diffusions=" << res.total_diffusions
                      << " transfers=" << res.rebalance_transfers << "\n";
            return res.converged ? 0 : 2;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
