#include "flexdo/dag.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "flexdo/random.hpp"

namespace flexdo {

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::kBadTaskIds: return "bad task ids";
        case ViolationKind::kDanglingEdge: return "dangling edge";
        case ViolationKind::kSelfLoop: return "self loop";
        case ViolationKind::kDuplicateEdge: return "duplicate edge";
        case ViolationKind::kNegativePayload: return "negative payload";
        case ViolationKind::kNegativeWork: return "negative work";
        case ViolationKind::kZeroWork: return "zero work";
        case ViolationKind::kCycle: return "cycle";
        case ViolationKind::kDisconnected: return "disconnected";
        case ViolationKind::kMultipleSources: return "multiple sources";
        case ViolationKind::kMultipleSinks: return "multiple sinks";
        case ViolationKind::kNoSource: return "no source";
        case ViolationKind::kNoSink: return "no sink";
        case ViolationKind::kTerminalMismatch: return "terminal mismatch";
    }
    return "unknown";
}

bool ValidationReport::contains(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::describe() const {
    std::ostringstream os;
    for (const auto& v : violations) {
        os << to_string(v.kind);
        if (!v.detail.empty()) os << ": " << v.detail;
        os << '\n';
    }
    return os.str();
}

DagApp::DagApp(std::vector<Task> tasks, std::vector<Edge> edges, TaskId initial, TaskId ending)
    : tasks_(std::move(tasks)), edges_(std::move(edges)), initial_(initial), ending_(ending) {
    std::stable_sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
    out_.resize(tasks_.size());
    in_.resize(tasks_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.src < tasks_.size() && e.dst < tasks_.size()) {
            out_[e.src].push_back(i);
            in_[e.dst].push_back(i);
        }
    }
}

namespace {

std::string edge_name(const Edge& e) {
    return "(" + std::to_string(e.src) + "," + std::to_string(e.dst) + ")";
}

}  // namespace

ValidationReport validate(const DagApp& dag) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::string detail) {
        report.violations.push_back({kind, std::move(detail)});
    };

    const auto& tasks = dag.tasks();
    const std::size_t n = tasks.size();

    for (std::size_t i = 0; i < n; ++i) {
        if (tasks[i].id != i) {
            add(ViolationKind::kBadTaskIds,
                "task at position " + std::to_string(i) + " has id " + std::to_string(tasks[i].id));
        }
        if (tasks[i].work < 0) add(ViolationKind::kNegativeWork, "task " + std::to_string(i));
        if (tasks[i].work == 0 && !dag.is_terminal(static_cast<TaskId>(i))) {
            add(ViolationKind::kZeroWork, "task " + std::to_string(i));
        }
    }
    if (dag.initial() >= n || dag.ending() >= n || dag.initial() == dag.ending()) {
        add(ViolationKind::kTerminalMismatch, "initial/ending ids must name two distinct tasks");
    } else if (dag.initial() != 0 || dag.ending() + 1 != n) {
        add(ViolationKind::kTerminalMismatch, "initial must be task 0 and ending task " + std::to_string(n - 1));
    }

    for (std::size_t i = 0; i < dag.edges().size(); ++i) {
        const Edge& e = dag.edges()[i];
        if (e.src >= n || e.dst >= n) add(ViolationKind::kDanglingEdge, edge_name(e));
        if (e.src == e.dst) add(ViolationKind::kSelfLoop, edge_name(e));
        if (e.data_bytes < 0) add(ViolationKind::kNegativePayload, edge_name(e));
        if (i > 0 && dag.edges()[i - 1].src == e.src && dag.edges()[i - 1].dst == e.dst) {
            add(ViolationKind::kDuplicateEdge, edge_name(e));
        }
    }
    if (n == 0) {
        add(ViolationKind::kNoSource, "empty graph");
        return report;
    }

    // Sources and sinks.
    std::vector<TaskId> sources, sinks;
    for (TaskId v = 0; v < n; ++v) {
        if (dag.in_edges(v).empty()) sources.push_back(v);
        if (dag.out_edges(v).empty()) sinks.push_back(v);
    }
    auto list = [](const std::vector<TaskId>& ids) {
        std::string s;
        for (auto id : ids) s += (s.empty() ? "" : " ") + std::to_string(id);
        return s;
    };
    if (sources.empty()) add(ViolationKind::kNoSource, "");
    if (sinks.empty()) add(ViolationKind::kNoSink, "");
    if (sources.size() > 1) add(ViolationKind::kMultipleSources, list(sources));
    if (sinks.size() > 1) add(ViolationKind::kMultipleSinks, list(sinks));
    if (sources.size() == 1 && sources[0] != dag.initial()) {
        add(ViolationKind::kTerminalMismatch, "initial is " + std::to_string(dag.initial()) +
                                                  " but the source is " + std::to_string(sources[0]));
    }
    if (sinks.size() == 1 && sinks[0] != dag.ending()) {
        add(ViolationKind::kTerminalMismatch, "ending is " + std::to_string(dag.ending()) +
                                                  " but the sink is " + std::to_string(sinks[0]));
    }

    // Cycle detection via Kahn.
    std::vector<std::size_t> indeg(n);
    for (TaskId v = 0; v < n; ++v) indeg[v] = dag.in_edges(v).size();
    std::vector<TaskId> stack(sources);
    std::size_t visited = 0;
    while (!stack.empty()) {
        TaskId v = stack.back();
        stack.pop_back();
        ++visited;
        for (auto ei : dag.out_edges(v)) {
            TaskId w = dag.edges()[ei].dst;
            if (--indeg[w] == 0) stack.push_back(w);
        }
    }
    if (visited != n) add(ViolationKind::kCycle, std::to_string(n - visited) + " tasks on or behind a cycle");

    // Weak connectivity.
    std::vector<char> seen(n, 0);
    std::vector<TaskId> frontier{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        TaskId v = frontier.back();
        frontier.pop_back();
        auto visit = [&](TaskId w) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                frontier.push_back(w);
            }
        };
        for (auto ei : dag.out_edges(v)) visit(dag.edges()[ei].dst);
        for (auto ei : dag.in_edges(v)) visit(dag.edges()[ei].src);
    }
    if (reached != n) add(ViolationKind::kDisconnected, std::to_string(n - reached) + " tasks unreachable");

    return report;
}

void require_valid(const DagApp& dag) {
    auto report = validate(dag);
    if (!report.ok()) throw std::invalid_argument("invalid DAG:\n" + report.describe());
}

std::vector<TaskId> topological_order(const DagApp& dag) {
    const std::size_t n = dag.task_count();
    std::vector<std::size_t> indeg(n);
    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
    for (TaskId v = 0; v < n; ++v) {
        indeg[v] = dag.in_edges(v).size();
        if (indeg[v] == 0) ready.push(v);
    }
    std::vector<TaskId> order;
    order.reserve(n);
    while (!ready.empty()) {
        TaskId v = ready.top();
        ready.pop();
        order.push_back(v);
        for (auto ei : dag.out_edges(v)) {
            TaskId w = dag.edges()[ei].dst;
            if (--indeg[w] == 0) ready.push(w);
        }
    }
    if (order.size() != n) throw std::invalid_argument("graph has a cycle");
    return order;
}

std::vector<Edge> anchors(const DagApp& dag) {
    require_valid(dag);
    std::vector<Edge> out;
    for (const auto& e : dag.edges()) {
        if (dag.is_anchor(e)) out.push_back(e);
    }
    return out;
}

OffloadDecision OffloadDecision::from_mask(const DagApp& dag, std::uint64_t mask) {
    OffloadDecision d(dag.task_count());
    for (TaskId id = 1; id + 1 < dag.task_count() && id <= 64; ++id) {
        if ((mask >> (id - 1)) & 1U) d.set(id, true);
    }
    return d;
}

std::size_t OffloadDecision::offloaded_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string OffloadDecision::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) s[i] = '1';
    }
    return s;
}

void require_valid(const DagApp& dag, const OffloadDecision& decision) {
    if (decision.size() != dag.task_count()) {
        throw std::invalid_argument("decision has " + std::to_string(decision.size()) +
                                    " entries for a DAG of " + std::to_string(dag.task_count()) +
                                    " tasks");
    }
    if (decision.offloaded(dag.initial()) || decision.offloaded(dag.ending())) {
        throw std::invalid_argument("initial and ending tasks cannot be offloaded");
    }
}

bool one_climb_compliant(const DagApp& dag, const OffloadDecision& decision) {
    if (decision.size() != dag.task_count()) {
        throw std::invalid_argument("decision length does not match the DAG");
    }
    const auto order = topological_order(dag);
    const std::size_t n = dag.task_count();
    std::vector<char> offloaded_above(n, 0), offloaded_below(n, 0);
    for (TaskId v : order) {
        for (auto ei : dag.in_edges(v)) {
            TaskId p = dag.edges()[ei].src;
            if (decision.offloaded(p) || offloaded_above[p]) {
                offloaded_above[v] = 1;
                break;
            }
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TaskId v = *it;
        for (auto ei : dag.out_edges(v)) {
            TaskId c = dag.edges()[ei].dst;
            if (decision.offloaded(c) || offloaded_below[c]) {
                offloaded_below[v] = 1;
                break;
            }
        }
    }
    for (TaskId v = 0; v < n; ++v) {
        if (!decision.offloaded(v) && offloaded_above[v] && offloaded_below[v]) return false;
    }
    return true;
}

PayloadRule uniform_up_to_memory() {
    return [](const Task& producer, const Task& consumer, std::mt19937_64& rng) -> std::int64_t {
        // The consumer bounds its own input; for edges into the ending task the
        // producer's data structure is the bound instead.
        const std::int64_t bound = consumer.mem_bytes > 0 ? consumer.mem_bytes : producer.mem_bytes;
        if (bound <= 0) return 0;
        return uniform_int(rng, 1, bound);
    };
}

PayloadRule constant_payload(std::int64_t bytes) {
    return [bytes](const Task&, const Task&, std::mt19937_64&) { return bytes; };
}

DagApp augment_with_terminals(const RawGraph& raw, std::uint64_t seed, const PayloadRule& rule) {
    const std::size_t n = raw.tasks.size();
    if (n == 0) throw std::invalid_argument("cannot augment an empty graph");
    for (std::size_t i = 0; i < n; ++i) {
        if (raw.tasks[i].id != i) throw std::invalid_argument("raw task ids must be 0..n-1 in order");
    }
    std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
    std::vector<std::vector<TaskId>> succ(n);
    for (const auto& e : raw.edges) {
        if (e.src >= n || e.dst >= n || e.src == e.dst) {
            throw std::invalid_argument("raw edge " + edge_name(e) + " is malformed");
        }
        ++outdeg[e.src];
        ++indeg[e.dst];
        succ[e.src].push_back(e.dst);
    }
    {
        auto remaining = indeg;
        std::vector<TaskId> stack;
        for (TaskId v = 0; v < n; ++v) {
            if (remaining[v] == 0) stack.push_back(v);
        }
        std::size_t visited = 0;
        while (!stack.empty()) {
            TaskId v = stack.back();
            stack.pop_back();
            ++visited;
            for (TaskId w : succ[v]) {
                if (--remaining[w] == 0) stack.push_back(w);
            }
        }
        if (visited != n) throw std::invalid_argument("raw graph is cyclic");
    }

    const TaskId ending = static_cast<TaskId>(n + 1);
    std::vector<Task> tasks;
    tasks.reserve(n + 2);
    tasks.push_back({0, 0.0, 0});
    for (const auto& t : raw.tasks) tasks.push_back({t.id + 1, t.work, t.mem_bytes});
    tasks.push_back({ending, 0.0, 0});

    std::vector<Edge> edges;
    edges.reserve(raw.edges.size() + n);
    for (const auto& e : raw.edges) edges.push_back({e.src + 1, e.dst + 1, e.data_bytes});

    std::mt19937_64 rng(seed);
    for (TaskId v = 0; v < n; ++v) {
        if (indeg[v] == 0) {
            edges.push_back({0, v + 1, rule(tasks[0], tasks[v + 1], rng)});
        }
    }
    for (TaskId v = 0; v < n; ++v) {
        if (outdeg[v] == 0) {
            edges.push_back({v + 1, ending, rule(tasks[v + 1], tasks[ending], rng)});
        }
    }
    return DagApp(std::move(tasks), std::move(edges), 0, ending);
}

}  // namespace flexdo
