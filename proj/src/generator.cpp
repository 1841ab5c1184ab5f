#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "flexdo/ingest.hpp"
#include "flexdo/random.hpp"

namespace flexdo {

ClusterSpec alibaba_sccg5() { return {2.5e9, 32.0}; }

// Heterogeneous cores (1x2.84, 3x2.42, 4x1.8 GHz) collapsed to their
// core-weighted mean clock.
DeviceSpec snapdragon_865() {
    return {CpuCount::of(8), (1 * 2.84e9 + 3 * 2.42e9 + 4 * 1.8e9) / 8.0, 8.0};
}

DeviceSpec xeon_d2100() { return {CpuCount::of(16), 2.0e9, 32.0}; }

Environment default_environment() {
    return {snapdragon_865(), xeon_d2100(), mbps_to_bytes_per_second(20.0)};
}

double rescale_cluster_to_edge(double cluster_seconds, const ClusterSpec& cluster, const DeviceSpec& edge) {
    return cluster_seconds * (cluster.clock_hz * cluster.ops_per_cycle) / (edge.clock_hz * edge.ops_per_cycle);
}

double rescale_edge_to_mobile(double edge_seconds, const DeviceSpec& edge, const DeviceSpec& mobile) {
    return edge_seconds * (edge.clock_hz * edge.ops_per_cycle) / (mobile.clock_hz * mobile.ops_per_cycle);
}

double cluster_time_to_work(double cluster_seconds, const ClusterSpec& cluster) {
    return cluster_seconds * cluster.ops_per_second();
}

std::vector<DeviceTimes> mobile_processing_profile(std::span<const double> cluster_seconds,
                                                   const ClusterSpec& cluster, const Environment& env) {
    std::vector<DeviceTimes> out;
    out.reserve(cluster_seconds.size());
    for (double tc : cluster_seconds) {
        if (!(tc >= 0) || !std::isfinite(tc)) throw std::invalid_argument("cluster times must be finite and >= 0");
        const double te = rescale_cluster_to_edge(tc, cluster, env.edge);
        out.push_back({rescale_edge_to_mobile(te, env.edge, env.mobile), te});
    }
    return out;
}

std::vector<DeviceTimes> mobile_processing_profile(const DagApp& dag, const ClusterSpec& cluster,
                                                   const Environment& env) {
    std::vector<double> tc;
    tc.reserve(dag.task_count());
    for (const auto& t : dag.tasks()) tc.push_back(t.work / cluster.ops_per_second());
    return mobile_processing_profile(tc, cluster, env);
}

namespace {

struct LayerBounds {
    int lo;
    int hi;
};

LayerBounds layer_bounds(int n, const GenParams& p) {
    const int needed = (n + p.max_width - 1) / p.max_width;
    int lo = std::max({n >= 2 ? 2 : 1, p.layers.lo, needed});
    lo = std::min(lo, n);
    int hi = std::max(lo, std::min(n, p.layers.hi));
    return {lo, hi};
}

}  // namespace

void require_valid(const GenParams& p) {
    if (p.n_tasks.lo < 1 || p.n_tasks.hi < p.n_tasks.lo) throw std::invalid_argument("task range must be non-empty and >= 1");
    if (p.layers.lo < 1 || p.layers.hi < p.layers.lo) throw std::invalid_argument("layer range must be non-empty and >= 1");
    if (p.max_width < 1) throw std::invalid_argument("max width must be >= 1");
    if (!(p.extra_edge_prob >= 0 && p.extra_edge_prob <= 1)) throw std::invalid_argument("edge probability must be in [0, 1]");
    if (!(p.cluster_seconds_min > 0) || p.cluster_seconds_max < p.cluster_seconds_min) {
        throw std::invalid_argument("cluster time range must be positive and ordered");
    }
    if (!(p.mem_bytes_min >= 1) || p.mem_bytes_max < p.mem_bytes_min) {
        throw std::invalid_argument("memory range must be >= 1 byte and ordered");
    }
    if (!(p.cluster.clock_hz > 0) || !(p.cluster.ops_per_cycle > 0)) throw std::invalid_argument("bad cluster spec");
    // Every task count must fit within the allowed layers and width.
    for (int n = p.n_tasks.lo; n <= p.n_tasks.hi; ++n) {
        const auto b = layer_bounds(n, p);
        if (static_cast<long>(std::min(b.hi, p.layers.hi)) * p.max_width < n) {
            throw std::invalid_argument("infeasible shape: " + std::to_string(p.layers.hi) + " layers x width " +
                                        std::to_string(p.max_width) + " < " + std::to_string(n) + " tasks");
        }
    }
}

RawGraph generate_raw_graph(const GenParams& p) {
    require_valid(p);
    std::mt19937_64 rng(p.seed);
    RawGraph g = {};
    const int span = p.n_tasks.hi - p.n_tasks.lo;
    int n;
    if (p.triangular_count) {
        const double u = 0.5 * (uniform01(rng) + uniform01(rng));
        n = p.n_tasks.lo + std::min(span, static_cast<int>(u * (span + 1)));
    } else {
        n = static_cast<int>(uniform_int(rng, p.n_tasks.lo, p.n_tasks.hi));
    }
    const auto bounds = layer_bounds(n, p);
    const int layers = static_cast<int>(uniform_int(rng, bounds.lo, bounds.hi));

    std::vector<int> width(layers, 1);
    for (int extra = n - layers; extra > 0; --extra) {
        std::vector<int> open;
        for (int l = 0; l < layers; ++l) {
            if (width[l] < p.max_width) open.push_back(l);
        }
        ++width[open[uniform_int(rng, 0, static_cast<std::int64_t>(open.size()) - 1)]];
    }
    std::vector<int> first(layers + 1, 0);
    for (int l = 0; l < layers; ++l) first[l + 1] = first[l] + width[l];
    std::vector<int> layer_of(n);
    for (int l = 0; l < layers; ++l) {
        for (int v = first[l]; v < first[l + 1]; ++v) layer_of[v] = l;
    }
    auto pick_in_layer = [&](int l) {
        return static_cast<TaskId>(uniform_int(rng, first[l], first[l + 1] - 1));
    };

    std::set<std::pair<TaskId, TaskId>> links;
    std::vector<int> children(n, 0);
    for (int v = first[1 < layers ? 1 : layers]; v < n; ++v) {
        const TaskId parent = pick_in_layer(layer_of[v] - 1);
        if (links.insert({parent, static_cast<TaskId>(v)}).second) ++children[parent];
    }
    for (int v = 0; layers > 1 && v < first[layers - 1]; ++v) {
        if (children[v] == 0) {
            links.insert({static_cast<TaskId>(v), pick_in_layer(layer_of[v] + 1)});
            ++children[v];
        }
    }
    for (int u = 0; u < n; ++u) {
        for (int v = first[layer_of[u] + 1]; v < n; ++v) {
            if (uniform01(rng) < p.extra_edge_prob) links.insert({static_cast<TaskId>(u), static_cast<TaskId>(v)});
        }
    }

    // Join weak components; each spans the first and last layer, so a
    // cross-layer pair always exists.
    std::vector<int> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](int x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (const auto& [a, b] : links) comp[find(static_cast<int>(a))] = find(static_cast<int>(b));
    for (int v = 0; v < n; ++v) {
        if (find(v) == find(0)) continue;
        for (int u = 0; u < n; ++u) {
            if (find(u) == find(0) && layer_of[u] != layer_of[v]) {
                const auto lo = layer_of[u] < layer_of[v] ? u : v;
                const auto hi = layer_of[u] < layer_of[v] ? v : u;
                links.insert({static_cast<TaskId>(lo), static_cast<TaskId>(hi)});
                comp[find(v)] = find(0);
                break;
            }
        }
    }

    g.tasks.reserve(n);
    for (int v = 0; v < n; ++v) {
        const double tc = log_uniform(rng, p.cluster_seconds_min, p.cluster_seconds_max);
        const auto mem = std::max<std::int64_t>(1, std::llround(log_uniform(rng, p.mem_bytes_min, p.mem_bytes_max)));
        g.tasks.push_back({static_cast<TaskId>(v), cluster_time_to_work(tc, p.cluster), mem});
    }

    // Incoming data per task: a total in [1, mem_bytes] split by a uniform composition.
    std::vector<std::vector<TaskId>> parents(n);
    for (const auto& [a, b] : links) parents[b].push_back(a);
    for (int v = 0; v < n; ++v) {
        const auto& ps = parents[v];
        if (ps.empty()) continue;
        const std::int64_t total = uniform_int(rng, 1, g.tasks[v].mem_bytes);
        std::vector<double> w(ps.size());
        for (auto& x : w) x = uniform01_open_low(rng);
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        // Cumulative boundaries keep every part non-negative and the sum exact.
        std::vector<std::int64_t> part(ps.size());
        double running = 0.0;
        std::int64_t prev = 0;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            running += w[i];
            std::int64_t edge_at = i + 1 == ps.size()
                                       ? total
                                       : static_cast<std::int64_t>(std::floor(static_cast<double>(total) * running / sum));
            edge_at = std::clamp(edge_at, prev, total);
            part[i] = edge_at - prev;
            prev = edge_at;
        }
        for (std::size_t i = 0; i < ps.size(); ++i) g.edges.push_back({ps[i], static_cast<TaskId>(v), part[i]});
    }
    return g;
}

DagApp generate_dag(const GenParams& params) {
    RawGraph raw = generate_raw_graph(params);
    // Terminal payloads draw from a stream derived from, but separate to, the graph's.
    std::mt19937_64 seeder(params.seed ^ 0x9e3779b97f4a7c15ULL);
    return augment_with_terminals(raw, seeder(), uniform_up_to_memory());
}

}  // namespace flexdo
