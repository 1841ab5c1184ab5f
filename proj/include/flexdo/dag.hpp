#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace flexdo {

using TaskId = std::uint32_t;

struct Task {
    TaskId id = 0;
    double work = 0.0;            // operations
    std::int64_t mem_bytes = 0;   // size of the task's data structure

    friend bool operator==(const Task&, const Task&) = default;
};

struct Edge {
    TaskId src = 0;
    TaskId dst = 0;
    std::int64_t data_bytes = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

enum class ViolationKind {
    kBadTaskIds,
    kDanglingEdge,
    kSelfLoop,
    kDuplicateEdge,
    kNegativePayload,
    kNegativeWork,
    kZeroWork,
    kCycle,
    kDisconnected,
    kMultipleSources,
    kMultipleSinks,
    kNoSource,
    kNoSink,
    kTerminalMismatch,
};

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool contains(ViolationKind kind) const;
    // Human-readable, one violation per line.
    std::string describe() const;
};

// A DAG application: tasks indexed by id, edges kept sorted by (src, dst).
//
// Construction never throws on graph-level problems; those are reported by
// validate(). Adjacency is only built for edges whose endpoints are in range.
class DagApp {
public:
    DagApp() = default;
    DagApp(std::vector<Task> tasks, std::vector<Edge> edges, TaskId initial, TaskId ending);

    const std::vector<Task>& tasks() const { return tasks_; }
    const std::vector<Edge>& edges() const { return edges_; }
    TaskId initial() const { return initial_; }
    TaskId ending() const { return ending_; }

    std::size_t task_count() const { return tasks_.size(); }
    // Number of offloadable tasks (N).
    std::size_t offloadable_count() const { return tasks_.size() < 2 ? 0 : tasks_.size() - 2; }
    bool is_terminal(TaskId id) const { return id == initial_ || id == ending_; }

    // Indices into edges().
    std::span<const std::size_t> out_edges(TaskId id) const { return out_[id]; }
    std::span<const std::size_t> in_edges(TaskId id) const { return in_[id]; }

    bool is_anchor(const Edge& e) const { return e.src == initial_ || e.dst == ending_; }

    friend bool operator==(const DagApp& a, const DagApp& b) {
        return a.tasks_ == b.tasks_ && a.edges_ == b.edges_ && a.initial_ == b.initial_ &&
               a.ending_ == b.ending_;
    }

private:
    std::vector<Task> tasks_;
    std::vector<Edge> edges_;
    TaskId initial_ = 0;
    TaskId ending_ = 0;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

ValidationReport validate(const DagApp& dag);

// Throws std::invalid_argument listing every violation when dag is invalid.
void require_valid(const DagApp& dag);

// Topological order of a valid DAG (Kahn, ties by ascending id).
std::vector<TaskId> topological_order(const DagApp& dag);

// Edges leaving the initial task plus edges entering the ending task.
std::vector<Edge> anchors(const DagApp& dag);

// Per-task placement: 0 = mobile device, 1 = edge server.
class OffloadDecision {
public:
    OffloadDecision() = default;
    explicit OffloadDecision(std::size_t task_count) : bits_(task_count, 0) {}
    explicit OffloadDecision(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    // Marks task (i + 1) for every set bit i of mask; terminals stay local.
    static OffloadDecision from_mask(const DagApp& dag, std::uint64_t mask);

    std::size_t size() const { return bits_.size(); }
    bool offloaded(TaskId id) const { return bits_[id] != 0; }
    void set(TaskId id, bool offload) { bits_[id] = offload ? 1 : 0; }
    std::size_t offloaded_count() const;
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    // "0110..." indexed by task id.
    std::string to_string() const;

    friend bool operator==(const OffloadDecision&, const OffloadDecision&) = default;
    friend auto operator<=>(const OffloadDecision&, const OffloadDecision&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

// Throws std::invalid_argument if the decision does not fit dag or offloads a terminal.
void require_valid(const DagApp& dag, const OffloadDecision& decision);

// False iff some local task has both an offloaded ancestor and an offloaded descendant.
bool one_climb_compliant(const DagApp& dag, const OffloadDecision& decision);

// A task graph before terminal augmentation: ids 0..n-1, possibly many sources and sinks.
struct RawGraph {
    std::vector<Task> tasks;
    std::vector<Edge> edges;
};

// Payload (bytes) for a new terminal edge, given the producing and consuming task.
// Exactly one of the two is a terminal.
using PayloadRule = std::function<std::int64_t(const Task& producer, const Task& consumer,
                                               std::mt19937_64& rng)>;

// Payload uniform in [1, mem_bytes] of the non-terminal endpoint.
PayloadRule uniform_up_to_memory();
PayloadRule constant_payload(std::int64_t bytes);

// Shifts raw ids by one, adds task 0 feeding every raw source and task n+1
// fed by every raw sink. Both terminals carry zero work and zero memory.
// Throws std::invalid_argument for cyclic or malformed input.
DagApp augment_with_terminals(const RawGraph& raw, std::uint64_t seed, const PayloadRule& rule);

}  // namespace flexdo
