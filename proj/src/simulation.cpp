#include "flexdo/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace flexdo {

namespace {

// Events closer than this are treated as simultaneous.
constexpr double kSimultaneous = 1e-12;

}  // namespace

CpuCount CpuCount::of(int cpus) {
    if (cpus <= 0) throw std::invalid_argument("CPU count must be positive, got " + std::to_string(cpus));
    return CpuCount(cpus);
}

std::string CpuCount::to_string() const {
    return is_unlimited() ? "inf" : std::to_string(*count_);
}

CpuCount CpuCount::parse(const std::string& text) {
    if (text == "inf" || text == "unlimited") return unlimited();
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw std::invalid_argument("bad CPU count '" + text + "'");
    return of(value);
}

void require_valid(const DeviceSpec& spec) {
    if (!(spec.clock_hz > 0) || !(spec.ops_per_cycle > 0) || !std::isfinite(spec.ops_per_second())) {
        throw std::invalid_argument("device clock and ops/cycle must be positive and finite");
    }
}

void require_valid(const Environment& env) {
    require_valid(env.mobile);
    require_valid(env.edge);
    if (!(env.channel_rate > 0) || !std::isfinite(env.channel_rate)) {
        throw std::invalid_argument("channel rate must be positive and finite");
    }
}

double processing_time(double operations, const DeviceSpec& spec) {
    return operations / (spec.clock_hz * spec.ops_per_cycle);
}

double transmission_time(std::int64_t bytes, double channel_rate) {
    return static_cast<double>(bytes) / channel_rate;
}

double cpu_scale_factor(std::size_t running, CpuCount cpus) {
    if (cpus.is_unlimited()) return 1.0;
    return std::max(1.0, static_cast<double>(running) / cpus.value());
}

double rescale_remaining(double remaining, double k_old, double k_new) {
    return remaining * k_new / k_old;
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::kTransferFinish: return "transfer_finish";
        case EventKind::kTaskFinish: return "task_finish";
        case EventKind::kTransferStart: return "transfer_start";
        case EventKind::kTaskStart: return "task_start";
    }
    return "unknown";
}

Simulator::Simulator(const DagApp& dag, const Environment& env) : dag_(&dag), env_(env) {
    require_valid(dag);
    require_valid(env);
    const auto n = dag.task_count();
    const auto m = dag.edges().size();
    mobile_time_.resize(n);
    edge_time_.resize(n);
    for (TaskId v = 0; v < n; ++v) {
        mobile_time_[v] = processing_time(dag.tasks()[v].work, env.mobile);
        edge_time_[v] = processing_time(dag.tasks()[v].work, env.edge);
    }
    link_time_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        link_time_[i] = transmission_time(dag.edges()[i].data_bytes, env.channel_rate);
    }
    pending_.resize(n);
    task_left_.resize(n);
    fresh_task_.resize(n);
    link_left_.resize(m);
    fresh_link_.resize(m);
    running_[0].reserve(n);
    running_[1].reserve(n);
    in_flight_.reserve(m);
    ready_.reserve(n);
    starting_.reserve(n);
    done_tasks_.reserve(n);
    done_links_.reserve(m);
}

double Simulator::makespan(const OffloadDecision& decision) {
    return execute(decision, nullptr);
}

SimResult Simulator::run(const OffloadDecision& decision) {
    SimResult result;
    result.makespan = execute(decision, &result.trace);
    return result;
}

double Simulator::execute(const OffloadDecision& decision, std::vector<TraceEvent>* trace) {
    const DagApp& dag = *dag_;
    require_valid(dag, decision);
    const auto& edges = dag.edges();
    const std::size_t n = dag.task_count();

    for (TaskId v = 0; v < n; ++v) pending_[v] = static_cast<std::uint32_t>(dag.in_edges(v).size());
    running_[0].clear();
    running_[1].clear();
    in_flight_.clear();
    ready_.clear();
    done_tasks_.clear();
    done_links_.clear();

    const CpuCount cpus[2] = {env_.mobile.cpus, env_.edge.cpus};
    std::size_t busy[2] = {0, 0};
    std::uint32_t kt = 0;
    double now = 0.0;
    bool ending_done = false;

    auto record = [&](EventKind kind, std::uint32_t subject) {
        if (trace) {
            trace->push_back({kind, subject, now, cpu_scale_factor(busy[0], cpus[0]),
                              cpu_scale_factor(busy[1], cpus[1]), kt});
        }
    };
    auto deliver = [&](std::size_t ei) {
        TaskId dst = edges[ei].dst;
        if (--pending_[dst] == 0) ready_.push_back(dst);
    };
    // Outgoing data of a finished task: local hand-off or a new transmission.
    auto emit_outputs = [&](TaskId v) {
        const bool here = decision.offloaded(v);
        for (auto ei : dag.out_edges(v)) {
            if (decision.offloaded(edges[ei].dst) == here) {
                deliver(ei);
            } else if (link_time_[ei] == 0.0) {
                record(EventKind::kTransferStart, static_cast<std::uint32_t>(ei));
                record(EventKind::kTransferFinish, static_cast<std::uint32_t>(ei));
                deliver(ei);
            } else {
                ++kt;
                in_flight_.push_back(static_cast<std::uint32_t>(ei));
                fresh_link_[ei] = 1;
                record(EventKind::kTransferStart, static_cast<std::uint32_t>(ei));
            }
        }
    };

    ready_.push_back(dag.initial());
    auto& starting = starting_;

    while (true) {
        const double kp_old[2] = {cpu_scale_factor(busy[0], cpus[0]), cpu_scale_factor(busy[1], cpus[1])};
        const double kt_old = static_cast<double>(kt);

        // Finishes first: transmissions, then tasks, each by ascending subject.
        std::sort(done_links_.begin(), done_links_.end());
        for (auto ei : done_links_) {
            --kt;
            record(EventKind::kTransferFinish, ei);
            deliver(ei);
        }
        std::sort(done_tasks_.begin(), done_tasks_.end());
        for (auto v : done_tasks_) {
            --busy[decision.offloaded(v)];
            record(EventKind::kTaskFinish, v);
            if (v == dag.ending()) ending_done = true;
            emit_outputs(v);
        }
        done_links_.clear();
        done_tasks_.clear();

        // Starts; zero-work tasks complete on the spot and may release more.
        while (!ready_.empty()) {
            starting.swap(ready_);
            ready_.clear();
            std::sort(starting.begin(), starting.end());
            for (TaskId v : starting) {
                const bool remote = decision.offloaded(v);
                const double solo = remote ? edge_time_[v] : mobile_time_[v];
                if (solo == 0.0) {
                    record(EventKind::kTaskStart, v);
                    record(EventKind::kTaskFinish, v);
                    if (v == dag.ending()) ending_done = true;
                    emit_outputs(v);
                } else {
                    ++busy[remote];
                    running_[remote].push_back(v);
                    fresh_task_[v] = 1;
                    record(EventKind::kTaskStart, v);
                }
            }
            starting.clear();
        }

        // Rescale everything still in progress to the new share factors.
        for (int d = 0; d < 2; ++d) {
            const double kp_new = cpu_scale_factor(busy[d], cpus[d]);
            for (TaskId v : running_[d]) {
                if (fresh_task_[v]) {
                    task_left_[v] = (d ? edge_time_[v] : mobile_time_[v]) * kp_new;
                    fresh_task_[v] = 0;
                } else if (kp_new != kp_old[d]) {
                    task_left_[v] = rescale_remaining(task_left_[v], kp_old[d], kp_new);
                }
            }
        }
        const double kt_new = static_cast<double>(kt);
        for (auto ei : in_flight_) {
            if (fresh_link_[ei]) {
                link_left_[ei] = link_time_[ei] * kt_new;
                fresh_link_[ei] = 0;
            } else if (kt_new != kt_old) {
                link_left_[ei] = rescale_remaining(link_left_[ei], kt_old, kt_new);
            }
        }

        if (running_[0].empty() && running_[1].empty() && in_flight_.empty()) break;

        // Advance to the next completion.
        double step = std::numeric_limits<double>::infinity();
        for (int d = 0; d < 2; ++d) {
            for (TaskId v : running_[d]) step = std::min(step, task_left_[v]);
        }
        for (auto ei : in_flight_) step = std::min(step, link_left_[ei]);
        if (!std::isfinite(step)) throw std::runtime_error("simulation produced a non-finite time");
        now += step;

        for (int d = 0; d < 2; ++d) {
            auto& list = running_[d];
            std::size_t keep = 0;
            for (TaskId v : list) {
                task_left_[v] -= step;
                if (task_left_[v] <= kSimultaneous) {
                    task_left_[v] = 0.0;
                    done_tasks_.push_back(v);
                } else {
                    list[keep++] = v;
                }
            }
            list.resize(keep);
        }
        std::size_t keep = 0;
        for (auto ei : in_flight_) {
            link_left_[ei] -= step;
            if (link_left_[ei] <= kSimultaneous) {
                link_left_[ei] = 0.0;
                done_links_.push_back(ei);
            } else {
                in_flight_[keep++] = ei;
            }
        }
        in_flight_.resize(keep);
    }

    if (!ending_done) throw std::logic_error("simulation stalled before the ending task finished");
    if (!std::isfinite(now)) throw std::runtime_error("simulation produced a non-finite makespan");
    return now;
}

SimResult simulate(const DagApp& dag, const Environment& env, const OffloadDecision& decision) {
    Simulator sim(dag, env);
    return sim.run(decision);
}

void write_trace_csv(std::ostream& os, const DagApp& dag, const SimResult& result) {
    os << "time,kind,subject,k_p_mobile,k_p_edge,k_t\n";
    char buf[160];
    for (const auto& ev : result.trace) {
        std::string subject;
        if (ev.kind == EventKind::kTaskStart || ev.kind == EventKind::kTaskFinish) {
            subject = std::to_string(ev.subject);
        } else {
            const Edge& e = dag.edges()[ev.subject];
            subject = std::to_string(e.src) + "-" + std::to_string(e.dst);
        }
        std::snprintf(buf, sizeof buf, "%.9g,%s,%s,%.9g,%.9g,%u\n", ev.time, to_string(ev.kind).c_str(),
                      subject.c_str(), ev.kp_mobile, ev.kp_edge, ev.kt);
        os << buf;
    }
}

}  // namespace flexdo
