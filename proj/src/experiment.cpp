#include "flexdo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace flexdo {

namespace fs = std::filesystem;

namespace {

std::string fmt_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string fmt_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

// ---- corpus --------------------------------------------------------------

Corpus load_corpus_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("corpus directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    Corpus corpus;
    for (const auto& f : files) {
        try {
            corpus.dags.push_back({f.stem().string(), load_dag(f.string())});
        } catch (const std::exception& e) {
            std::string reason = e.what();
            std::replace(reason.begin(), reason.end(), '\n', ' ');
            corpus.skipped.push_back(f.filename().string() + ": " + reason);
            std::cerr << "skipping " << f.filename().string() << ": " << reason << '\n';
        }
    }
    return corpus;
}

Corpus generate_corpus(const GenParams& base, std::size_t count) {
    Corpus corpus;
    corpus.dags.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        GenParams p = base;
        p.seed = base.seed + i;
        char id[32];
        std::snprintf(id, sizeof id, "gen-%06llu", static_cast<unsigned long long>(p.seed));
        corpus.dags.push_back({id, generate_dag(p)});
    }
    return corpus;
}

void write_corpus(const std::string& dir, const Corpus& corpus) {
    fs::create_directories(dir);
    for (const auto& entry : corpus.dags) save_dag((fs::path(dir) / (entry.id + ".json")).string(), entry.dag);
}

// ---- solvers by name -----------------------------------------------------

std::string SolverSpec::name() const {
    switch (kind) {
        case SolverKind::kFlexdo0: return "flexdo-0";
        case SolverKind::kFlexdoN: return "flexdo-N";
        case SolverKind::kFlexdoN2: return "flexdo-N2";
        case SolverKind::kFlexdoFixed: return "flexdo-" + std::to_string(second_phase);
        case SolverKind::kNoOffloading: return "no-offloading";
        case SolverKind::kFullOffloading: return "full-offloading";
        case SolverKind::kExhaustive: return "exhaustive";
    }
    return "unknown";
}

SolverSpec parse_solver(const std::string& name) {
    if (name == "flexdo-0") return {SolverKind::kFlexdo0};
    if (name == "flexdo-N") return {SolverKind::kFlexdoN};
    if (name == "flexdo-N2" || name == "flexdo-N^2") return {SolverKind::kFlexdoN2};
    if (name == "no-offloading") return {SolverKind::kNoOffloading};
    if (name == "full-offloading") return {SolverKind::kFullOffloading};
    if (name == "exhaustive") return {SolverKind::kExhaustive};
    const std::string prefix = "flexdo-";
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
        const auto digits = name.substr(prefix.size());
        if (std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }) &&
            digits.size() < 6) {
            return {SolverKind::kFlexdoFixed, static_cast<std::size_t>(std::stoul(digits))};
        }
    }
    throw std::invalid_argument("unknown solver '" + name + "'");
}

SolverRun run_solver(const SolverSpec& solver, const DagApp& dag, const Environment& env, std::size_t cap) {
    const std::size_t n = dag.offloadable_count();
    auto from_outcome = [](SolveOutcome o) {
        return SolverRun{std::move(o.decision), o.makespan, o.candidates_evaluated};
    };
    auto single = [&](OffloadDecision d) {
        Simulator sim(dag, env);
        const double m = sim.makespan(d);
        return SolverRun{std::move(d), m, 1};
    };
    switch (solver.kind) {
        case SolverKind::kFlexdo0: return from_outcome(flexdo(dag, env, FlexdoParams(0, n)));
        case SolverKind::kFlexdoN: return from_outcome(flexdo(dag, env, FlexdoParams::log_n(n)));
        case SolverKind::kFlexdoN2: return from_outcome(flexdo(dag, env, FlexdoParams::log_n_squared(n)));
        case SolverKind::kFlexdoFixed:
            return from_outcome(flexdo(dag, env, FlexdoParams(std::min(solver.second_phase, n), n)));
        case SolverKind::kNoOffloading: return single(no_offloading(dag));
        case SolverKind::kFullOffloading: return single(full_offloading(dag));
        case SolverKind::kExhaustive: return from_outcome(exhaustive_optimal(dag, env, cap));
    }
    throw std::logic_error("unhandled solver kind");
}

// ---- scenarios -----------------------------------------------------------

std::string to_string(ScenarioAxis axis) {
    switch (axis) {
        case ScenarioAxis::kMobileCpus: return "mobile-cpus";
        case ScenarioAxis::kEdgeCpus: return "edge-cpus";
        case ScenarioAxis::kRate: return "rate";
    }
    return "unknown";
}

ScenarioAxis parse_axis(const std::string& text) {
    if (text == "mobile-cpus") return ScenarioAxis::kMobileCpus;
    if (text == "edge-cpus") return ScenarioAxis::kEdgeCpus;
    if (text == "rate") return ScenarioAxis::kRate;
    throw std::invalid_argument("unknown scenario '" + text + "' (expected mobile-cpus, edge-cpus or rate)");
}

std::vector<ScenarioPoint> scenario_points(const ScenarioSweep& sweep, const HardwareProfile& hardware) {
    std::vector<ScenarioPoint> points;
    const Environment base = hardware.env;
    switch (sweep.axis) {
        case ScenarioAxis::kMobileCpus: {
            auto counts = sweep.mobile_cpus;
            if (counts.empty()) {
                counts = {CpuCount::of(2), CpuCount::of(4), CpuCount::of(8), CpuCount::unlimited()};
            }
            for (const auto& c : counts) {
                Environment env = base;
                env.mobile.cpus = c;
                points.push_back({c.to_string(), env});
            }
            break;
        }
        case ScenarioAxis::kEdgeCpus: {
            auto counts = sweep.edge_cpus;
            if (counts.empty()) counts = {CpuCount::of(1), CpuCount::of(2), CpuCount::of(4), CpuCount::of(16)};
            for (const auto& c : counts) {
                Environment env = base;
                env.mobile.cpus = CpuCount::unlimited();
                env.edge.cpus = c;
                points.push_back({c.to_string(), env});
            }
            break;
        }
        case ScenarioAxis::kRate: {
            auto rates = sweep.rates_mbps;
            if (rates.empty()) rates = {10.0, 20.0, 100.0};
            for (double r : rates) {
                if (!(r > 0)) throw std::invalid_argument("rates must be positive");
                Environment env = base;
                env.mobile.cpus = CpuCount::unlimited();
                env.channel_rate = mbps_to_bytes_per_second(r);
                points.push_back({fmt_g(r), env});
            }
            break;
        }
    }
    return points;
}

// ---- experiment ----------------------------------------------------------

void require_valid(const ExperimentConfig& cfg) {
    if (cfg.corpus.dags.empty()) throw std::invalid_argument("corpus is empty");
    if (cfg.solvers.empty()) throw std::invalid_argument("at least one solver is required");
    const bool exhaustive = std::any_of(cfg.solvers.begin(), cfg.solvers.end(),
                                        [](const SolverSpec& s) { return s.kind == SolverKind::kExhaustive; });
    if (exhaustive) {
        for (const auto& entry : cfg.corpus.dags) {
            if (entry.dag.offloadable_count() > cfg.cap) {
                throw std::invalid_argument("exhaustive solver requested but DAG " + entry.id + " has N = " +
                                            std::to_string(entry.dag.offloadable_count()) + " > cap " +
                                            std::to_string(cfg.cap));
            }
        }
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    require_valid(cfg);
    const auto points = scenario_points(cfg.sweep, cfg.hardware);
    const std::string scenario = to_string(cfg.sweep.axis);
    const auto& dags = cfg.corpus.dags;

    // One slot per DAG, filled by whichever worker picks it up.
    std::vector<std::vector<ResultRow>> per_dag(dags.size());
    auto work_on = [&](std::size_t i) {
        const auto& entry = dags[i];
        auto& out = per_dag[i];
        for (const auto& point : points) {
            std::vector<ResultRow> batch;
            std::optional<double> optimum;
            for (const auto& solver : cfg.solvers) {
                const auto start = std::chrono::steady_clock::now();
                SolverRun run = run_solver(solver, entry.dag, point.env, cfg.cap);
                const auto stop = std::chrono::steady_clock::now();
                ResultRow row;
                row.dag_id = entry.id;
                row.scenario = scenario;
                row.point = point.label;
                row.solver = solver.name();
                row.makespan = run.makespan;
                row.one_climb = one_climb_compliant(entry.dag, run.decision);
                row.candidates_evaluated = run.candidates_evaluated;
                if (cfg.record_wall_time) {
                    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
                }
                row.decision = std::move(run.decision);
                if (solver.kind == SolverKind::kExhaustive) optimum = row.makespan;
                batch.push_back(std::move(row));
            }
            if (optimum) {
                for (auto& row : batch) row.gap_percent = relative_gap(row.makespan, *optimum);
            }
            for (auto& row : batch) out.push_back(std::move(row));
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(dags.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < dags.size(); ++i) work_on(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < dags.size(); i = next++) work_on(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    ExperimentResult result;
    for (auto& rows : per_dag) {
        for (auto& r : rows) result.rows.push_back(std::move(r));
    }

    for (const auto& point : points) {
        for (const auto& solver : cfg.solvers) {
            AggregateRow agg;
            agg.scenario = scenario;
            agg.point = point.label;
            agg.solver = solver.name();
            agg.skipped = cfg.corpus.skipped.size();
            double sum = 0.0, gap_sum = 0.0;
            std::size_t gaps = 0;
            std::vector<double> values;
            for (const auto& r : result.rows) {
                if (r.point != point.label || r.solver != agg.solver) continue;
                values.push_back(r.makespan);
                sum += r.makespan;
                if (r.gap_percent) {
                    gap_sum += *r.gap_percent;
                    ++gaps;
                }
                if (!r.one_climb) ++agg.one_climb_violations;
            }
            agg.count = values.size();
            if (agg.count > 0) agg.makespan_mean = sum / static_cast<double>(agg.count);
            if (agg.count > 1) {
                double ss = 0.0;
                for (double v : values) ss += (v - agg.makespan_mean) * (v - agg.makespan_mean);
                agg.makespan_sd = std::sqrt(ss / static_cast<double>(agg.count - 1));
            }
            if (gaps > 0) agg.gap_mean = gap_sum / static_cast<double>(gaps);
            result.aggregate.push_back(std::move(agg));
        }
    }
    return result;
}

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "dag_id,scenario,point,solver,makespan_s,gap_pct,one_climb,candidates,wall_ms\n";
    for (const auto& r : rows) {
        os << csv_field(r.dag_id) << ',' << r.scenario << ',' << r.point << ',' << r.solver << ','
           << fmt_g(r.makespan) << ',' << (r.gap_percent ? fmt_fixed(*r.gap_percent, 6) : "") << ','
           << (r.one_climb ? 1 : 0) << ',' << r.candidates_evaluated << ','
           << (r.wall_ms ? fmt_fixed(*r.wall_ms, 3) : "") << '\n';
    }
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scenario,point,solver,count,makespan_mean,makespan_sd,makespan_summary,gap_mean_pct,"
          "one_climb_violations,skipped\n";
    for (const auto& a : rows) {
        os << a.scenario << ',' << a.point << ',' << a.solver << ',' << a.count << ',' << fmt_g(a.makespan_mean)
           << ',' << fmt_g(a.makespan_sd) << ',' << fmt_fixed(a.makespan_mean, 2) << " ± "
           << fmt_fixed(a.makespan_sd, 2) << ',' << (a.gap_mean ? fmt_fixed(*a.gap_mean, 6) : "") << ','
           << a.one_climb_violations << ',' << a.skipped << '\n';
    }
}

void write_experiment(const std::string& dir, const ExperimentResult& result) {
    fs::create_directories(dir);
    {
        auto out = open_out(fs::path(dir) / "rows.csv");
        write_rows_csv(out, result.rows);
    }
    {
        auto out = open_out(fs::path(dir) / "aggregate.csv");
        write_aggregate_csv(out, result.aggregate);
    }
    // Chosen placements, one file per scenario point.
    std::map<std::string, std::vector<const ResultRow*>> by_point;
    std::vector<std::string> order;
    for (const auto& r : result.rows) {
        const std::string key = r.scenario + "_" + r.point;
        if (!by_point.count(key)) order.push_back(key);
        by_point[key].push_back(&r);
    }
    for (const auto& key : order) {
        auto out = open_out(fs::path(dir) / ("decisions_" + key + ".csv"));
        out << "dag_id,solver,makespan_s,placement\n";
        for (const auto* r : by_point[key]) {
            out << csv_field(r->dag_id) << ',' << r->solver << ',' << fmt_g(r->makespan) << ','
                << r->decision.to_string() << '\n';
        }
    }
}

// ---- corpus statistics ---------------------------------------------------

CorpusStats corpus_stats(const Corpus& corpus) {
    if (corpus.dags.empty()) throw std::invalid_argument("corpus is empty");
    CorpusStats stats;
    for (const auto& entry : corpus.dags) {
        const DagApp& dag = entry.dag;
        DagStats s;
        s.dag_id = entry.id;
        s.offloadable = dag.offloadable_count();
        s.edges = dag.edges().size();
        for (const auto& e : dag.edges()) {
            if (!dag.is_anchor(e)) ++s.offloadable_edges;
        }
        if (s.offloadable >= 2) {
            const double pairs = static_cast<double>(s.offloadable) * static_cast<double>(s.offloadable - 1) / 2.0;
            s.density = static_cast<double>(s.offloadable_edges) / pairs;
        }
        stats.dags.push_back(s);
    }

    auto integer_bins = [&](const std::string& metric, auto value_of) {
        std::map<std::size_t, std::size_t> counts;
        for (const auto& s : stats.dags) ++counts[value_of(s)];
        for (const auto& [v, c] : counts) {
            stats.histogram.push_back({metric, static_cast<double>(v), static_cast<double>(v + 1), c});
        }
    };
    integer_bins("tasks", [](const DagStats& s) { return s.offloadable; });
    integer_bins("edges", [](const DagStats& s) { return s.offloadable_edges; });
    constexpr int kDensityBins = 10;
    std::vector<std::size_t> density(kDensityBins, 0);
    for (const auto& s : stats.dags) {
        const int bin = std::min(kDensityBins - 1, static_cast<int>(s.density * kDensityBins));
        ++density[bin];
    }
    for (int b = 0; b < kDensityBins; ++b) {
        stats.histogram.push_back(
            {"density", static_cast<double>(b) / kDensityBins, static_cast<double>(b + 1) / kDensityBins, density[b]});
    }
    return stats;
}

void write_stats_csv(std::ostream& per_dag, std::ostream& histogram, const CorpusStats& stats) {
    per_dag << "dag_id,n_offloadable,edges,offloadable_edges,density\n";
    for (const auto& s : stats.dags) {
        per_dag << csv_field(s.dag_id) << ',' << s.offloadable << ',' << s.edges << ',' << s.offloadable_edges << ','
                << fmt_g(s.density) << '\n';
    }
    histogram << "metric,bin_lo,bin_hi,count\n";
    for (const auto& h : stats.histogram) {
        histogram << h.metric << ',' << fmt_g(h.lo) << ',' << fmt_g(h.hi) << ',' << h.count << '\n';
    }
}

// ---- one-climb census ----------------------------------------------------

CensusResult one_climb_census(const Corpus& corpus, const Environment& env, std::size_t cap) {
    for (const auto& entry : corpus.dags) {
        if (entry.dag.offloadable_count() > cap) {
            throw std::invalid_argument("census refused: DAG " + entry.id + " exceeds the exhaustive cap");
        }
    }
    CensusResult result;
    for (const auto& entry : corpus.dags) {
        const auto best = exhaustive_optimal(entry.dag, env, cap);
        ++result.total;
        if (!one_climb_compliant(entry.dag, best.decision)) result.violating.push_back(entry.id);
    }
    return result;
}

}  // namespace flexdo
