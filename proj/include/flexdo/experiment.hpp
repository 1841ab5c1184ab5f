#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flexdo/dag.hpp"
#include "flexdo/ingest.hpp"
#include "flexdo/simulation.hpp"
#include "flexdo/solvers.hpp"

namespace flexdo {

// ---- corpus --------------------------------------------------------------

struct CorpusEntry {
    std::string id;
    DagApp dag;
};

struct Corpus {
    std::vector<CorpusEntry> dags;
    // "<file>: <reason>" for each entry that could not be loaded.
    std::vector<std::string> skipped;
};

// Every *.json in dir, sorted by file name; unreadable or invalid files are skipped.
Corpus load_corpus_dir(const std::string& dir);

// count DAGs with seeds base.seed, base.seed + 1, ...; ids "gen-<seed>".
Corpus generate_corpus(const GenParams& base, std::size_t count);

// Writes <id>.json per DAG, creating dir if needed.
void write_corpus(const std::string& dir, const Corpus& corpus);

// ---- solvers by name -----------------------------------------------------

enum class SolverKind { kFlexdo0, kFlexdoN, kFlexdoN2, kFlexdoFixed, kNoOffloading, kFullOffloading, kExhaustive };

struct SolverSpec {
    SolverKind kind = SolverKind::kFlexdoN;
    std::size_t second_phase = 0;  // kFlexdoFixed only

    std::string name() const;
    friend bool operator==(const SolverSpec&, const SolverSpec&) = default;
};

// flexdo-0, flexdo-N, flexdo-N2 (or flexdo-N^2), flexdo-<k>, no-offloading,
// full-offloading, exhaustive.
SolverSpec parse_solver(const std::string& name);

struct SolverRun {
    OffloadDecision decision;
    double makespan = 0.0;
    std::size_t candidates_evaluated = 0;
};

// s_II of kFlexdoFixed is clamped to N.
SolverRun run_solver(const SolverSpec& solver, const DagApp& dag, const Environment& env,
                     std::size_t cap = kDefaultExhaustiveCap);

// ---- scenarios -----------------------------------------------------------

enum class ScenarioAxis { kMobileCpus, kEdgeCpus, kRate };

std::string to_string(ScenarioAxis axis);
// "mobile-cpus", "edge-cpus" or "rate".
ScenarioAxis parse_axis(const std::string& text);

struct ScenarioPoint {
    std::string label;  // swept value: "4", "inf", "20"
    Environment env;
};

struct ScenarioSweep {
    ScenarioAxis axis = ScenarioAxis::kMobileCpus;
    // Empty lists take the defaults of the axis: mobile {2,4,8,inf},
    // edge {1,2,4,16}, rate {10,20,100} Mbps.
    std::vector<CpuCount> mobile_cpus;
    std::vector<CpuCount> edge_cpus;
    std::vector<double> rates_mbps;
};

// The swept quantity varies; everything else comes from the hardware profile,
// except that the edge and rate sweeps run the mobile device with unlimited CPUs.
std::vector<ScenarioPoint> scenario_points(const ScenarioSweep& sweep, const HardwareProfile& hardware);

// ---- experiment ----------------------------------------------------------

struct ExperimentConfig {
    Corpus corpus;
    ScenarioSweep sweep;
    std::vector<SolverSpec> solvers;
    HardwareProfile hardware{alibaba_sccg5(), default_environment()};
    std::size_t cap = kDefaultExhaustiveCap;
    bool record_wall_time = false;  // wall_ms is left empty otherwise, keeping output reproducible
    unsigned jobs = 1;
};

// Throws std::invalid_argument on an empty corpus, no solvers, or exhaustive
// requested with a DAG above the cap.
void require_valid(const ExperimentConfig& cfg);

struct ResultRow {
    std::string dag_id;
    std::string scenario;
    std::string point;
    std::string solver;
    double makespan = 0.0;
    std::optional<double> gap_percent;  // only when exhaustive ran on the same (dag, point)
    bool one_climb = true;
    std::size_t candidates_evaluated = 0;
    std::optional<double> wall_ms;
    OffloadDecision decision;
};

struct AggregateRow {
    std::string scenario;
    std::string point;
    std::string solver;
    std::size_t count = 0;
    double makespan_mean = 0.0;
    double makespan_sd = 0.0;  // sample standard deviation
    std::optional<double> gap_mean;
    std::size_t one_climb_violations = 0;
    std::size_t skipped = 0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;  // ordered by (dag, point, solver)
    std::vector<AggregateRow> aggregate;  // ordered by (point, solver)
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);
// Writes rows.csv, aggregate.csv and decisions_<scenario>_<point>.csv into dir.
void write_experiment(const std::string& dir, const ExperimentResult& result);

// ---- corpus statistics ---------------------------------------------------

struct DagStats {
    std::string dag_id;
    std::size_t offloadable = 0;        // N
    std::size_t edges = 0;              // all edges, anchors included
    std::size_t offloadable_edges = 0;  // edges between offloadable tasks
    double density = 0.0;               // offloadable_edges / (N(N-1)/2); 0 when N < 2
};

struct HistogramBin {
    std::string metric;
    double lo;
    double hi;
    std::size_t count;
};

struct CorpusStats {
    std::vector<DagStats> dags;
    std::vector<HistogramBin> histogram;
};

// Throws std::invalid_argument on an empty corpus.
CorpusStats corpus_stats(const Corpus& corpus);
void write_stats_csv(std::ostream& per_dag, std::ostream& histogram, const CorpusStats& stats);

// ---- one-climb census ----------------------------------------------------

struct CensusResult {
    std::size_t total = 0;
    std::vector<std::string> violating;
    double fraction() const { return total == 0 ? 0.0 : static_cast<double>(violating.size()) / total; }
};

// Exhaustive optimum per DAG, checked against the one-climb policy.
CensusResult one_climb_census(const Corpus& corpus, const Environment& env, std::size_t cap = kDefaultExhaustiveCap);

}  // namespace flexdo
