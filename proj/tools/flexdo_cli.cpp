// flexdo: generate DAG corpora, solve offloading decisions, and run scenario sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "flexdo/experiment.hpp"

namespace fs = std::filesystem;
using namespace flexdo;

namespace {

struct HardwareOptions {
    std::string profile_path;
    std::vector<std::string> mobile_cpus;
    std::vector<std::string> edge_cpus;
    std::vector<double> rates_mbps;
};

void add_hardware_flags(CLI::App* cmd, HardwareOptions& hw, bool lists) {
    cmd->add_option("--hardware", hw.profile_path, "Hardware profile (JSON)")->check(CLI::ExistingFile);
    auto* m = cmd->add_option("--mobile-cpus", hw.mobile_cpus, "Mobile CPU count(s), or inf");
    auto* e = cmd->add_option("--edge-cpus", hw.edge_cpus, "Edge CPU count(s), or inf");
    auto* r = cmd->add_option("--rate-mbps", hw.rates_mbps, "Channel rate(s) in Mbps");
    if (lists) {
        m->delimiter(',');
        e->delimiter(',');
        r->delimiter(',');
    } else {
        m->expected(1);
        e->expected(1);
        r->expected(1);
    }
}

HardwareProfile base_profile(const HardwareOptions& hw) {
    if (hw.profile_path.empty()) return {alibaba_sccg5(), default_environment()};
    std::ifstream in(hw.profile_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hardware_profile(ss.str());
}

std::vector<CpuCount> parse_counts(const std::vector<std::string>& text) {
    std::vector<CpuCount> out;
    for (const auto& t : text) out.push_back(CpuCount::parse(t));
    return out;
}

// Single-point environment for solve/census.
Environment point_environment(const HardwareOptions& hw) {
    Environment env = base_profile(hw).env;
    if (!hw.mobile_cpus.empty()) env.mobile.cpus = CpuCount::parse(hw.mobile_cpus.front());
    if (!hw.edge_cpus.empty()) env.edge.cpus = CpuCount::parse(hw.edge_cpus.front());
    if (!hw.rates_mbps.empty()) {
        if (!(hw.rates_mbps.front() > 0)) throw std::invalid_argument("rate must be positive");
        env.channel_rate = mbps_to_bytes_per_second(hw.rates_mbps.front());
    }
    return env;
}

struct CorpusOptions {
    std::string dir;
    std::size_t generate = 0;
    std::uint64_t seed = 1;
    int min_tasks = 18;
    int max_tasks = 28;
};

void add_corpus_flags(CLI::App* cmd, CorpusOptions& c, bool allow_generate) {
    cmd->add_option("--corpus", c.dir, "Directory of DAG documents");
    cmd->add_option("--seed", c.seed, "Base seed for generated DAGs");
    cmd->add_option("--min-tasks", c.min_tasks, "Smallest offloadable task count when generating");
    cmd->add_option("--max-tasks", c.max_tasks, "Largest offloadable task count when generating");
    if (allow_generate) cmd->add_option("--generate", c.generate, "Generate this many DAGs instead of reading --corpus");
}

GenParams gen_params(const CorpusOptions& c) {
    GenParams p;
    p.n_tasks = {c.min_tasks, c.max_tasks};
    p.seed = c.seed;
    return p;
}

Corpus obtain_corpus(const CorpusOptions& c) {
    if (!c.dir.empty() && c.generate > 0) throw std::invalid_argument("use either --corpus or --generate, not both");
    if (c.generate > 0) return generate_corpus(gen_params(c), c.generate);
    if (c.dir.empty()) throw std::invalid_argument("--corpus is required");
    return load_corpus_dir(c.dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAG offloading between a mobile device and an edge server"};
    app.require_subcommand(1);

    // generate
    CorpusOptions gen_opts;
    std::string gen_out;
    std::size_t gen_count = 10;
    auto* gen = app.add_subcommand("generate", "Write a synthetic DAG corpus");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--count", gen_count, "Number of DAGs");
    add_corpus_flags(gen, gen_opts, false);

    // solve
    std::string solve_dag, solve_solver = "flexdo-N", solve_trace;
    int solve_sii = -1;
    std::size_t solve_cap = kDefaultExhaustiveCap;
    HardwareOptions solve_hw;
    auto* solve = app.add_subcommand("solve", "Solve one DAG with one solver");
    solve->add_option("--dag", solve_dag, "DAG document")->required()->check(CLI::ExistingFile);
    solve->add_option("--solver", solve_solver, "flexdo-0|flexdo-N|flexdo-N2|no-offloading|full-offloading|exhaustive");
    solve->add_option("--sii", solve_sii, "Run FlexDO with this second-phase size");
    solve->add_option("--cap", solve_cap, "Largest N the exhaustive solver accepts");
    solve->add_option("--trace", solve_trace, "Write the event trace of the chosen decision as CSV");
    add_hardware_flags(solve, solve_hw, false);

    // experiment
    CorpusOptions exp_corpus;
    HardwareOptions exp_hw;
    std::string exp_scenario = "mobile-cpus", exp_out;
    std::vector<std::string> exp_solvers{"flexdo-0", "flexdo-N", "flexdo-N2", "no-offloading", "full-offloading"};
    std::size_t exp_cap = kDefaultExhaustiveCap;
    bool exp_timing = false;
    unsigned exp_jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* exp = app.add_subcommand("experiment", "Run a scenario sweep over a corpus");
    add_corpus_flags(exp, exp_corpus, true);
    add_hardware_flags(exp, exp_hw, true);
    exp->add_option("--scenario", exp_scenario, "mobile-cpus|edge-cpus|rate");
    exp->add_option("--solvers", exp_solvers, "Comma-separated solver names")->delimiter(',');
    exp->add_option("--out", exp_out, "Output directory")->required();
    exp->add_option("--cap", exp_cap, "Largest N the exhaustive solver accepts");
    exp->add_flag("--timing", exp_timing, "Fill the wall_ms column (output is then not reproducible)");
    exp->add_option("--jobs", exp_jobs, "Worker threads");

    // stats
    CorpusOptions stats_corpus;
    std::string stats_out;
    auto* stats = app.add_subcommand("stats", "Task-count, edge-count and density histograms");
    add_corpus_flags(stats, stats_corpus, true);
    stats->add_option("--out", stats_out, "Output directory")->required();

    // census
    CorpusOptions census_corpus;
    HardwareOptions census_hw;
    std::size_t census_cap = kDefaultExhaustiveCap;
    auto* census = app.add_subcommand("census", "Fraction of exhaustive optima that break the one-climb policy");
    add_corpus_flags(census, census_corpus, true);
    add_hardware_flags(census, census_hw, false);
    census->add_option("--cap", census_cap, "Largest N the exhaustive solver accepts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Corpus corpus = generate_corpus(gen_params(gen_opts), gen_count);
            write_corpus(gen_out, corpus);
            std::cout << "wrote " << corpus.dags.size() << " DAGs to " << gen_out << '\n';
        } else if (solve->parsed()) {
            const DagApp dag = load_dag(solve_dag);
            const Environment env = point_environment(solve_hw);
            SolverSpec spec = solve_sii >= 0 ? SolverSpec{SolverKind::kFlexdoFixed, static_cast<std::size_t>(solve_sii)}
                                             : parse_solver(solve_solver);
            if (spec.kind == SolverKind::kFlexdoFixed && spec.second_phase > dag.offloadable_count()) {
                throw std::invalid_argument("--sii exceeds the DAG's " + std::to_string(dag.offloadable_count()) +
                                            " offloadable tasks");
            }
            const SolverRun run = run_solver(spec, dag, env, solve_cap);
            std::printf("solver     %s\n", spec.name().c_str());
            std::printf("decision   %s\n", run.decision.to_string().c_str());
            std::printf("makespan   %.9g s\n", run.makespan);
            std::printf("candidates %zu\n", run.candidates_evaluated);
            std::printf("one-climb  %s\n", one_climb_compliant(dag, run.decision) ? "compliant" : "violated");
            if (!solve_trace.empty()) {
                std::ofstream out(solve_trace);
                if (!out) throw std::runtime_error("cannot write " + solve_trace);
                write_trace_csv(out, dag, simulate(dag, env, run.decision));
            }
        } else if (exp->parsed()) {
            ExperimentConfig cfg;
            cfg.corpus = obtain_corpus(exp_corpus);
            cfg.sweep.axis = parse_axis(exp_scenario);
            cfg.sweep.mobile_cpus = parse_counts(exp_hw.mobile_cpus);
            cfg.sweep.edge_cpus = parse_counts(exp_hw.edge_cpus);
            cfg.sweep.rates_mbps = exp_hw.rates_mbps;
            cfg.hardware = base_profile(exp_hw);
            for (const auto& s : exp_solvers) cfg.solvers.push_back(parse_solver(s));
            cfg.cap = exp_cap;
            cfg.record_wall_time = exp_timing;
            cfg.jobs = exp_jobs;
            const auto result = run_experiment(cfg);
            write_experiment(exp_out, result);
            write_aggregate_csv(std::cout, result.aggregate);
        } else if (stats->parsed()) {
            const auto result = corpus_stats(obtain_corpus(stats_corpus));
            fs::create_directories(stats_out);
            std::ofstream per_dag(fs::path(stats_out) / "stats_dags.csv");
            std::ofstream hist(fs::path(stats_out) / "stats_histogram.csv");
            if (!per_dag || !hist) throw std::runtime_error("cannot write into " + stats_out);
            write_stats_csv(per_dag, hist, result);
            std::cout << "density is computed over offloadable tasks only (terminals excluded)\n";
        } else if (census->parsed()) {
            const Corpus corpus = obtain_corpus(census_corpus);
            const auto result = one_climb_census(corpus, point_environment(census_hw), census_cap);
            std::printf("dags       %zu\n", result.total);
            std::printf("violating  %zu (%.2f%%)\n", result.violating.size(), 100.0 * result.fraction());
            for (const auto& id : result.violating) std::printf("  %s\n", id.c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
