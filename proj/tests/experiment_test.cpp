#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "flexdo/experiment.hpp"
#include "test_support.hpp"

using namespace flexdo;
using namespace flexdo::testing;
namespace fs = std::filesystem;

namespace {

Corpus small_corpus(std::size_t count, int lo, int hi) {
    return generate_corpus(small_params(lo, hi, 100), count);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("flexdo_experiment_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FLEXDO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Solvers, ParseNames) {
    EXPECT_EQ(parse_solver("flexdo-0").kind, SolverKind::kFlexdo0);
    EXPECT_EQ(parse_solver("flexdo-N").kind, SolverKind::kFlexdoN);
    EXPECT_EQ(parse_solver("flexdo-N2").kind, SolverKind::kFlexdoN2);
    EXPECT_EQ(parse_solver("flexdo-N^2").kind, SolverKind::kFlexdoN2);
    EXPECT_EQ(parse_solver("flexdo-3").second_phase, 3u);
    EXPECT_EQ(parse_solver("exhaustive").name(), "exhaustive");
    EXPECT_THROW(parse_solver("heft"), std::invalid_argument);
}

TEST(Scenarios, DefaultPoints) {
    HardwareProfile hw{alibaba_sccg5(), default_environment()};
    ScenarioSweep s;
    auto pts = scenario_points(s, hw);
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(pts[3].label, "inf");
    s.axis = ScenarioAxis::kEdgeCpus;
    pts = scenario_points(s, hw);
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(pts[0].label, "1");
    EXPECT_TRUE(pts[0].env.mobile.cpus.is_unlimited());
    s.axis = ScenarioAxis::kRate;
    pts = scenario_points(s, hw);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[2].label, "100");
    EXPECT_DOUBLE_EQ(pts[2].env.channel_rate, 12.5e6);
    EXPECT_EQ(parse_axis("rate"), ScenarioAxis::kRate);
    EXPECT_THROW(parse_axis("power"), std::invalid_argument);
}

TEST(Experiment, ChainRateSweepHasZeroGap) {
    // Huge payloads keep the only task local.
    ExperimentConfig cfg;
    cfg.corpus.dags.push_back({"chain", build_dag({0, 1e9, 0}, {{0, 1, 1'000'000'000}, {1, 2, 1'000'000'000}})});
    cfg.sweep.axis = ScenarioAxis::kRate;
    cfg.solvers = {parse_solver("no-offloading"), parse_solver("exhaustive")};
    auto result = run_experiment(cfg);
    ASSERT_EQ(result.rows.size(), 6u);
    for (const auto& row : result.rows) {
        ASSERT_TRUE(row.gap_percent.has_value());
        EXPECT_EQ(*row.gap_percent, 0.0);
    }
}

TEST(Experiment, RowsAreReproducibleAndAggregatesAreMeans) {
    ExperimentConfig cfg;
    cfg.corpus = small_corpus(8, 4, 9);
    cfg.sweep.axis = ScenarioAxis::kEdgeCpus;
    cfg.solvers = {parse_solver("flexdo-N"), parse_solver("no-offloading"), parse_solver("exhaustive")};
    auto result = run_experiment(cfg);
    ASSERT_EQ(result.rows.size(), 8u * 4u * 3u);

    std::map<std::string, const DagApp*> by_id;
    for (const auto& e : cfg.corpus.dags) by_id[e.id] = &e.dag;
    std::map<std::string, Environment> env_of;
    for (const auto& p : scenario_points(cfg.sweep, cfg.hardware)) env_of[p.label] = p.env;

    std::map<std::pair<std::string, std::string>, double> no_off;
    std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
    for (const auto& row : result.rows) {
        const double again = simulate(*by_id[row.dag_id], env_of[row.point], row.decision).makespan;
        EXPECT_EQ(row.makespan, again);
        EXPECT_TRUE(row.gap_percent.has_value());
        EXPECT_GE(*row.gap_percent, 0.0);
        if (row.solver == "no-offloading") no_off[{row.dag_id, row.point}] = row.makespan;
        auto& s = sums[{row.point, row.solver}];
        s.first += row.makespan;
        s.second += 1;
    }
    for (const auto& row : result.rows) {
        if (row.solver == "flexdo-N") EXPECT_LE(row.makespan, (no_off[{row.dag_id, row.point}]));
    }
    ASSERT_EQ(result.aggregate.size(), 4u * 3u);
    for (const auto& a : result.aggregate) {
        const auto& s = sums[{a.point, a.solver}];
        EXPECT_EQ(a.count, static_cast<std::size_t>(s.second));
        EXPECT_NEAR(a.makespan_mean, s.first / s.second, 1e-9 * a.makespan_mean);
    }
}

TEST(Experiment, ParallelMatchesSerial) {
    ExperimentConfig cfg;
    cfg.corpus = small_corpus(6, 4, 10);
    cfg.solvers = {parse_solver("flexdo-N2"), parse_solver("full-offloading")};
    std::ostringstream a, b;
    write_rows_csv(a, run_experiment(cfg).rows);
    cfg.jobs = 3;
    write_rows_csv(b, run_experiment(cfg).rows);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Experiment, WritesFilesDeterministically) {
    ExperimentConfig cfg;
    cfg.corpus = small_corpus(5, 4, 8);
    cfg.sweep.axis = ScenarioAxis::kRate;
    cfg.solvers = {parse_solver("flexdo-0"), parse_solver("flexdo-N"), parse_solver("exhaustive")};
    auto d1 = scratch("a"), d2 = scratch("b");
    write_experiment(d1.string(), run_experiment(cfg));
    write_experiment(d2.string(), run_experiment(cfg));
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
        ++files;
        EXPECT_EQ(slurp(entry.path()), slurp(d2 / entry.path().filename())) << entry.path();
    }
    EXPECT_EQ(files, 2u + 3u);
    EXPECT_TRUE(fs::exists(d1 / "decisions_rate_20.csv"));
    const auto rows = slurp(d1 / "rows.csv");
    EXPECT_EQ(rows.substr(0, rows.find('\n')),
              "dag_id,scenario,point,solver,makespan_s,gap_pct,one_climb,candidates,wall_ms");
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Experiment, RejectsBadConfig) {
    ExperimentConfig cfg;
    cfg.solvers = {parse_solver("flexdo-N")};
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
    cfg.corpus = small_corpus(2, 10, 12);
    cfg.solvers = {parse_solver("exhaustive")};
    cfg.cap = 8;
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
    cfg.solvers.clear();
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(Corpus, LoadSkipsBadFiles) {
    auto dir = scratch("corpus");
    auto corpus = small_corpus(3, 4, 6);
    write_corpus(dir.string(), corpus);
    std::ofstream(dir / "zz-broken.json") << "{ not json";
    std::ofstream(dir / "zz-cyclic.json") << R"({"initial": 0, "ending": 2,
      "tasks": [{"id": 0, "work": 0}, {"id": 1, "work": 1}, {"id": 2, "work": 0}],
      "edges": [{"src": 0, "dst": 1, "data_bytes": 1}, {"src": 1, "dst": 2, "data_bytes": 1},
                {"src": 2, "dst": 0, "data_bytes": 1}]})";
    auto loaded = load_corpus_dir(dir.string());
    ASSERT_EQ(loaded.dags.size(), 3u);
    EXPECT_EQ(loaded.skipped.size(), 2u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(loaded.dags[i].id, corpus.dags[i].id);
        EXPECT_EQ(loaded.dags[i].dag, corpus.dags[i].dag);
    }

    ExperimentConfig cfg;
    cfg.corpus = loaded;
    cfg.solvers = {parse_solver("no-offloading")};
    for (const auto& a : run_experiment(cfg).aggregate) EXPECT_EQ(a.skipped, 2u);
    fs::remove_all(dir);
}

TEST(Stats, SingleDag) {
    Corpus c;
    GenParams p;
    p.n_tasks = {23, 23};
    c.dags.push_back({"one", generate_dag(p)});
    auto s = corpus_stats(c);
    ASSERT_EQ(s.dags.size(), 1u);
    EXPECT_EQ(s.dags[0].offloadable, 23u);
    EXPECT_THROW(corpus_stats(Corpus{}), std::invalid_argument);
}

TEST(Stats, DensityExtremes) {
    // Complete DAG on 4 offloadable tasks.
    std::vector<Edge> edges{{0, 1, 1}, {4, 5, 1}};
    for (TaskId i = 1; i <= 4; ++i) {
        for (TaskId j = i + 1; j <= 4; ++j) edges.push_back({i, j, 1});
    }
    Corpus c;
    c.dags.push_back({"complete", build_dag({0, 1, 1, 1, 1, 0}, edges)});
    // Edgeless core: every offloadable task hangs off the terminals only.
    c.dags.push_back({"edgeless", build_dag({0, 1, 1, 1, 0}, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 4, 1},
                                                              {2, 4, 1}, {3, 4, 1}})});
    auto s = corpus_stats(c);
    EXPECT_DOUBLE_EQ(s.dags[0].density, 1.0);
    EXPECT_EQ(s.dags[0].offloadable_edges, 6u);
    EXPECT_DOUBLE_EQ(s.dags[1].density, 0.0);
    std::ostringstream per_dag, hist;
    write_stats_csv(per_dag, hist, s);
    EXPECT_NE(per_dag.str().find("complete"), std::string::npos);
    EXPECT_NE(hist.str().find("density"), std::string::npos);
}

TEST(Census, LocalChainsAreCompliant) {
    Corpus c;
    for (int i = 0; i < 3; ++i) {
        c.dags.push_back({"chain" + std::to_string(i),
                          build_dag({0, 1e6, 1e6, 0}, {{0, 1, 1'000'000'000}, {1, 2, 1}, {2, 3, 1'000'000'000}})});
    }
    auto r = one_climb_census(c, default_environment());
    EXPECT_EQ(r.total, 3u);
    EXPECT_EQ(r.fraction(), 0.0);
}

TEST(Census, CounterexampleIsCounted) {
    Corpus c;
    c.dags.push_back({"counter", one_climb_counterexample()});
    c.dags.push_back({"chain", build_dag({0, 1, 0}, {{0, 1, 100}, {1, 2, 100}})});
    auto r = one_climb_census(c, one_climb_counterexample_env());
    ASSERT_EQ(r.violating.size(), 1u);
    EXPECT_EQ(r.violating[0], "counter");
    EXPECT_DOUBLE_EQ(r.fraction(), 0.5);
    EXPECT_THROW(one_climb_census(c, one_climb_counterexample_env(), 2), std::invalid_argument);
}

TEST(Cli, ExitCodes) {
    auto dir = scratch("cli");
    const std::string d = dir.string();
    EXPECT_EQ(run_cli("generate --out " + d + "/corpus --count 3 --min-tasks 4 --max-tasks 6"), 0);
    EXPECT_EQ(run_cli("solve --dag " + d + "/corpus/gen-000001.json --solver exhaustive --trace " + d + "/t.csv"), 0);
    EXPECT_TRUE(fs::exists(dir / "t.csv"));
    EXPECT_EQ(run_cli("experiment --corpus " + d + "/corpus --scenario rate --solvers flexdo-N,exhaustive --out " +
                      d + "/exp"),
              0);
    EXPECT_TRUE(fs::exists(dir / "exp" / "aggregate.csv"));
    EXPECT_EQ(run_cli("stats --corpus " + d + "/corpus --out " + d + "/stats"), 0);
    EXPECT_EQ(run_cli("census --corpus " + d + "/corpus"), 0);

    EXPECT_NE(run_cli("solve --dag " + d + "/corpus/gen-000001.json --solver heft"), 0);
    EXPECT_NE(run_cli("solve --dag " + d + "/corpus/gen-000001.json --solver exhaustive --cap 2"), 0);
    EXPECT_NE(run_cli("solve --dag " + d + "/nope.json"), 0);
    EXPECT_NE(run_cli("experiment --corpus " + d + "/empty --out " + d + "/x"), 0);
    EXPECT_NE(run_cli("bogus"), 0);
    fs::remove_all(dir);
}
