#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flexdo/dag.hpp"
#include "flexdo/simulation.hpp"

namespace flexdo {

// Size of FlexDO's exhaustive second phase.
class FlexdoParams {
public:
    // Throws std::invalid_argument unless second_phase <= offloadable tasks.
    FlexdoParams(std::size_t second_phase, std::size_t offloadable);

    // s_II = ceil(log2 N) and ceil(log2 N^2), clamped to [0, N].
    static FlexdoParams log_n(std::size_t offloadable);
    static FlexdoParams log_n_squared(std::size_t offloadable);

    std::size_t second_phase() const { return second_phase_; }
    // Tasks the first phase marks before handing over (s_I = N - s_II).
    std::size_t first_phase() const { return offloadable_ - second_phase_; }

private:
    std::size_t second_phase_;
    std::size_t offloadable_;
};

struct SolveOutcome {
    OffloadDecision decision;
    double makespan = 0.0;
    std::size_t candidates_evaluated = 0;
    // Every distinct candidate in generation order, when requested.
    std::optional<std::vector<OffloadDecision>> candidate_set;
};

OffloadDecision no_offloading(const DagApp& dag);
OffloadDecision full_offloading(const DagApp& dag);

// Ranking cost of a non-anchor edge for the greedy phase.
struct RankedEdge {
    std::size_t edge;  // index into DagApp::edges()
    double cost;       // seconds; may be negative
};

// Solo transmission time of each non-anchor edge minus the solo times of all
// anchors touching either endpoint. Returned in edge order.
std::vector<RankedEdge> adjusted_edge_costs(const DagApp& dag, const Environment& env);

// t_mobile - t_edge - sum of solo transmission times of every incident edge.
// Throws std::invalid_argument for terminal tasks.
double offloading_gain(const DagApp& dag, const Environment& env, TaskId task);

// Greedy edge-pairing phase: No Offloading followed by one decision per marking step.
std::vector<OffloadDecision> flexdo_phase_one(const DagApp& dag, const Environment& env,
                                              const FlexdoParams& params);

// Phase one plus every joint marking of the tasks the last phase-one decision
// left unmarked. Returns the best simulated candidate; ties go to the earliest.
SolveOutcome flexdo(const DagApp& dag, const Environment& env, const FlexdoParams& params,
                    bool keep_candidates = false);

inline constexpr std::size_t kDefaultExhaustiveCap = 26;

// Minimum over all 2^N decisions; ties go to the lowest placement mask.
// Throws std::invalid_argument when N exceeds cap.
SolveOutcome exhaustive_optimal(const DagApp& dag, const Environment& env,
                                std::size_t cap = kDefaultExhaustiveCap);

// 100 * (heur - opt) / opt.
double relative_gap(double heuristic, double optimal);

}  // namespace flexdo
