#include "flexdo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace flexdo {

FlexdoParams::FlexdoParams(std::size_t second_phase, std::size_t offloadable)
    : second_phase_(second_phase), offloadable_(offloadable) {
    if (second_phase > offloadable) {
        throw std::invalid_argument("s_II = " + std::to_string(second_phase) + " exceeds N = " +
                                    std::to_string(offloadable));
    }
}

namespace {

std::size_t clamp_exponent(double exponent, std::size_t offloadable) {
    if (offloadable == 0) return 0;
    const double rounded = std::ceil(exponent - 1e-12);
    if (rounded <= 0) return 0;
    return std::min(static_cast<std::size_t>(rounded), offloadable);
}

}  // namespace

FlexdoParams FlexdoParams::log_n(std::size_t offloadable) {
    const double n = static_cast<double>(std::max<std::size_t>(offloadable, 1));
    return {clamp_exponent(std::log2(n), offloadable), offloadable};
}

FlexdoParams FlexdoParams::log_n_squared(std::size_t offloadable) {
    const double n = static_cast<double>(std::max<std::size_t>(offloadable, 1));
    return {clamp_exponent(2.0 * std::log2(n), offloadable), offloadable};
}

OffloadDecision no_offloading(const DagApp& dag) {
    require_valid(dag);
    return OffloadDecision(dag.task_count());
}

OffloadDecision full_offloading(const DagApp& dag) {
    require_valid(dag);
    OffloadDecision d(dag.task_count());
    for (TaskId v = 0; v < dag.task_count(); ++v) {
        if (!dag.is_terminal(v)) d.set(v, true);
    }
    return d;
}

std::vector<RankedEdge> adjusted_edge_costs(const DagApp& dag, const Environment& env) {
    require_valid(dag);
    require_valid(env);
    const auto& edges = dag.edges();
    // Sum of anchor solo times touching each task.
    std::vector<double> anchor_load(dag.task_count(), 0.0);
    for (const auto& e : edges) {
        if (!dag.is_anchor(e)) continue;
        const double t = transmission_time(e.data_bytes, env.channel_rate);
        anchor_load[e.src] += t;
        anchor_load[e.dst] += t;
    }
    std::vector<RankedEdge> ranked;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (dag.is_anchor(e)) continue;
        // Non-anchor endpoints are never terminals, so the loads hold only anchors.
        const double cost =
            transmission_time(e.data_bytes, env.channel_rate) - anchor_load[e.src] - anchor_load[e.dst];
        ranked.push_back({i, cost});
    }
    return ranked;
}

double offloading_gain(const DagApp& dag, const Environment& env, TaskId task) {
    if (task >= dag.task_count() || dag.is_terminal(task)) {
        throw std::invalid_argument("offloading gain is undefined for task " + std::to_string(task));
    }
    const double work = dag.tasks()[task].work;
    double gain = processing_time(work, env.mobile) - processing_time(work, env.edge);
    for (auto ei : dag.in_edges(task)) gain -= transmission_time(dag.edges()[ei].data_bytes, env.channel_rate);
    for (auto ei : dag.out_edges(task)) gain -= transmission_time(dag.edges()[ei].data_bytes, env.channel_rate);
    return gain;
}

std::vector<OffloadDecision> flexdo_phase_one(const DagApp& dag, const Environment& env,
                                              const FlexdoParams& params) {
    require_valid(dag);
    if (params.first_phase() + params.second_phase() != dag.offloadable_count()) {
        throw std::invalid_argument("FlexDO parameters were built for a different task count");
    }
    const std::size_t target = params.first_phase();
    const auto& edges = dag.edges();

    OffloadDecision current(dag.task_count());
    std::size_t marked = 0;
    std::vector<OffloadDecision> decisions{current};
    auto mark = [&](TaskId v) {
        if (!current.offloaded(v)) {
            current.set(v, true);
            ++marked;
        }
    };

    // Edges sit in (src, dst) order, so keeping the first maximum breaks ties
    // toward the lexicographically smaller edge.
    std::vector<RankedEdge> pool = adjusted_edge_costs(dag, env);
    while (!pool.empty() && marked < target) {
        const RankedEdge* best_frontier = nullptr;
        const RankedEdge* best_any = nullptr;
        for (const auto& r : pool) {
            const Edge& e = edges[r.edge];
            if (!best_any || r.cost > best_any->cost) best_any = &r;
            if (current.offloaded(e.src) != current.offloaded(e.dst)) {
                if (!best_frontier || r.cost > best_frontier->cost) best_frontier = &r;
            }
        }
        if (best_frontier) {
            const Edge& e = edges[best_frontier->edge];
            mark(current.offloaded(e.src) ? e.dst : e.src);
        } else {
            const Edge& e = edges[best_any->edge];
            mark(e.src);
            mark(e.dst);
        }
        decisions.push_back(current);
        std::erase_if(pool, [&](const RankedEdge& r) {
            return current.offloaded(edges[r.edge].src) && current.offloaded(edges[r.edge].dst);
        });
    }

    if (marked < target) {
        struct Scored {
            TaskId task;
            double gain;
        };
        std::vector<Scored> rest;
        for (TaskId v = 0; v < dag.task_count(); ++v) {
            if (!dag.is_terminal(v) && !current.offloaded(v)) rest.push_back({v, offloading_gain(dag, env, v)});
        }
        std::stable_sort(rest.begin(), rest.end(),
                         [](const Scored& a, const Scored& b) { return a.gain > b.gain; });
        for (const auto& s : rest) {
            if (marked >= target) break;
            mark(s.task);
            decisions.push_back(current);
        }
    }
    return decisions;
}

SolveOutcome flexdo(const DagApp& dag, const Environment& env, const FlexdoParams& params,
                    bool keep_candidates) {
    const auto first = flexdo_phase_one(dag, env, params);
    const OffloadDecision& base = first.back();

    std::vector<TaskId> open;
    for (TaskId v = 0; v < dag.task_count(); ++v) {
        if (!dag.is_terminal(v) && !base.offloaded(v)) open.push_back(v);
    }
    if (open.size() >= 63) throw std::invalid_argument("second phase too large to enumerate");

    Simulator sim(dag, env);
    SolveOutcome out;
    out.makespan = std::numeric_limits<double>::infinity();
    if (keep_candidates) out.candidate_set.emplace();

    std::set<OffloadDecision> seen;
    auto consider = [&](const OffloadDecision& d) {
        if (!seen.insert(d).second) return;
        const double m = sim.makespan(d);
        ++out.candidates_evaluated;
        if (m < out.makespan) {
            out.makespan = m;
            out.decision = d;
        }
        if (keep_candidates) out.candidate_set->push_back(d);
    };
    for (const auto& d : first) consider(d);

    // Second-phase decisions are distinct supersets of base; only their
    // collisions with phase-one decisions need checking.
    OffloadDecision d = base;
    const std::uint64_t combos = std::uint64_t{1} << open.size();
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        for (std::size_t b = 0; b < open.size(); ++b) d.set(open[b], (mask >> b) & 1U);
        if (seen.contains(d)) continue;
        const double m = sim.makespan(d);
        ++out.candidates_evaluated;
        if (m < out.makespan) {
            out.makespan = m;
            out.decision = d;
        }
        if (keep_candidates) out.candidate_set->push_back(d);
    }
    return out;
}

SolveOutcome exhaustive_optimal(const DagApp& dag, const Environment& env, std::size_t cap) {
    require_valid(dag);
    const std::size_t n = dag.offloadable_count();
    if (n > cap || n >= 63) {
        throw std::invalid_argument("exhaustive search refused: N = " + std::to_string(n) +
                                    " exceeds the cap of " + std::to_string(std::min<std::size_t>(cap, 62)));
    }
    Simulator sim(dag, env);
    SolveOutcome out;
    out.makespan = std::numeric_limits<double>::infinity();
    OffloadDecision d(dag.task_count());
    const std::uint64_t combos = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        for (std::size_t b = 0; b < n; ++b) d.set(static_cast<TaskId>(b + 1), (mask >> b) & 1U);
        const double m = sim.makespan(d);
        if (m < out.makespan) {
            out.makespan = m;
            out.decision = d;
        }
    }
    out.candidates_evaluated = combos;
    return out;
}

double relative_gap(double heuristic, double optimal) {
    if (!(optimal > 0)) throw std::invalid_argument("relative gap needs a positive optimal makespan");
    if (heuristic < optimal * (1.0 - 1e-9)) {
        throw std::invalid_argument("heuristic makespan is below the optimum");
    }
    return 100.0 * (heuristic - optimal) / optimal;
}

}  // namespace flexdo
