#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flexdo/dag.hpp"

namespace flexdo {

// CPU count of a device; Unlimited is its own state so the scale factor is exactly 1.
class CpuCount {
public:
    static CpuCount unlimited() { return CpuCount(); }
    static CpuCount of(int cpus);

    bool is_unlimited() const { return !count_.has_value(); }
    int value() const { return *count_; }

    // "inf" or the decimal count.
    std::string to_string() const;
    // Accepts "inf", "unlimited" or a positive integer.
    static CpuCount parse(const std::string& text);

    friend bool operator==(const CpuCount&, const CpuCount&) = default;

private:
    CpuCount() = default;
    explicit CpuCount(int cpus) : count_(cpus) {}
    std::optional<int> count_;
};

struct DeviceSpec {
    CpuCount cpus = CpuCount::of(1);
    double clock_hz = 1.0;
    double ops_per_cycle = 1.0;

    double ops_per_second() const { return clock_hz * ops_per_cycle; }
};

struct Environment {
    DeviceSpec mobile;
    DeviceSpec edge;
    double channel_rate = 1.0;  // bytes/second, shared by uplink and downlink

    const DeviceSpec& device(bool offloaded) const { return offloaded ? edge : mobile; }
};

// Throws std::invalid_argument on non-positive clocks, capacities or rates.
void require_valid(const DeviceSpec& spec);
void require_valid(const Environment& env);

// Solo execution time of n operations on one CPU of spec.
double processing_time(double operations, const DeviceSpec& spec);

// Solo transmission time of bytes over an idle channel.
double transmission_time(std::int64_t bytes, double channel_rate);

// max{1, running / cpus}; exactly 1 for unlimited CPUs.
double cpu_scale_factor(std::size_t running, CpuCount cpus);

// Remaining time after the share factor changes from k_old to k_new.
double rescale_remaining(double remaining, double k_old, double k_new);

enum class EventKind : std::uint8_t {
    kTransferFinish,
    kTaskFinish,
    kTransferStart,
    kTaskStart,
};

std::string to_string(EventKind kind);

struct TraceEvent {
    EventKind kind;
    // Task id for task events, index into DagApp::edges() for transfers.
    std::uint32_t subject;
    double time;
    // Factors in effect right after this event.
    double kp_mobile;
    double kp_edge;
    std::uint32_t kt;
};

struct SimResult {
    double makespan = 0.0;
    std::vector<TraceEvent> trace;
};

// Reusable evaluator for one (dag, env) pair. Buffers are sized once, so
// repeated makespan() calls do not allocate. Not thread-safe; use one per worker.
class Simulator {
public:
    // Validates both arguments; the DAG must outlive the simulator.
    Simulator(const DagApp& dag, const Environment& env);

    double makespan(const OffloadDecision& decision);
    SimResult run(const OffloadDecision& decision);

    const DagApp& dag() const { return *dag_; }
    const Environment& environment() const { return env_; }

private:
    double execute(const OffloadDecision& decision, std::vector<TraceEvent>* trace);

    const DagApp* dag_;
    Environment env_;
    std::vector<double> mobile_time_;   // solo time per task on each device
    std::vector<double> edge_time_;
    std::vector<double> link_time_;     // solo time per edge

    std::vector<std::uint32_t> pending_;
    std::vector<double> task_left_;
    std::vector<double> link_left_;
    std::vector<char> fresh_task_;
    std::vector<char> fresh_link_;
    std::vector<TaskId> running_[2];
    std::vector<std::uint32_t> in_flight_;
    std::vector<TaskId> ready_;
    std::vector<TaskId> starting_;
    std::vector<TaskId> done_tasks_;
    std::vector<std::uint32_t> done_links_;
};

// Runs one simulation with a full event trace.
SimResult simulate(const DagApp& dag, const Environment& env, const OffloadDecision& decision);

// Header `time,kind,subject,k_p_mobile,k_p_edge,k_t`, nine significant digits.
// Transfers are written as `src-dst`.
void write_trace_csv(std::ostream& os, const DagApp& dag, const SimResult& result);

}  // namespace flexdo
