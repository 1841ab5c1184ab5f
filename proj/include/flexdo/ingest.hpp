#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flexdo/dag.hpp"
#include "flexdo/simulation.hpp"

namespace flexdo {

// Schema problem in a DAG or hardware document; what() starts with the JSON path.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& path, const std::string& reason)
        : std::runtime_error(path + ": " + reason), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// ---- DAG documents -------------------------------------------------------
//
// {
//   "initial": 0, "ending": 3,
//   "tasks": [{"id": 0, "work": 0, "mem_bytes": 0}, ...],
//   "edges": [{"src": 0, "dst": 1, "data_bytes": 1024}, ...]
// }
//
// Parallel edges between the same pair are merged by summing payloads. Graph
// invariants are not checked here; run validate() on the result.

DagApp parse_dag_file(std::string_view text);
std::string write_dag_file(const DagApp& dag);

// Reads and parses a file, then require_valid(). Throws FormatError,
// std::invalid_argument or std::runtime_error (I/O).
DagApp load_dag(const std::string& path);
void save_dag(const std::string& path, const DagApp& dag);

// ---- hardware ------------------------------------------------------------

struct ClusterSpec {
    double clock_hz = 1.0;
    double ops_per_cycle = 1.0;

    double ops_per_second() const { return clock_hz * ops_per_cycle; }
};

// Named presets: "alibaba-sccg5" (cluster), "snapdragon-865" (mobile),
// "xeon-d2100" (edge).
ClusterSpec alibaba_sccg5();
DeviceSpec snapdragon_865();
DeviceSpec xeon_d2100();

inline constexpr double kBytesPerMbps = 125'000.0;
inline double mbps_to_bytes_per_second(double mbps) { return mbps * kBytesPerMbps; }

// Snapdragon-865 mobile, Xeon D-2100 edge server, 20 Mbps.
Environment default_environment();

struct HardwareProfile {
    ClusterSpec cluster;
    Environment env;
};

// {"cluster": {"clock_hz", "ops_per_cycle"} | "<preset>",
//  "mobile": {"cpus": 8 | "inf", "clock_hz", "ops_per_cycle"} | "<preset>",
//  "edge": ..., "rate_mbps": 20}
// Missing sections fall back to the defaults above.
HardwareProfile parse_hardware_profile(std::string_view text);
std::string write_hardware_profile(const HardwareProfile& profile);

// Cluster-measured time to edge-server time, and edge to mobile time.
double rescale_cluster_to_edge(double cluster_seconds, const ClusterSpec& cluster, const DeviceSpec& edge);
double rescale_edge_to_mobile(double edge_seconds, const DeviceSpec& edge, const DeviceSpec& mobile);

// Operation count that takes cluster_seconds on one cluster CPU.
double cluster_time_to_work(double cluster_seconds, const ClusterSpec& cluster);

struct DeviceTimes {
    double mobile;
    double edge;
};

// Per-task solo times on both devices, derived from the tasks' work counts
// read as cluster time and passed through cluster->edge->mobile rescaling.
std::vector<DeviceTimes> mobile_processing_profile(const DagApp& dag, const ClusterSpec& cluster,
                                                   const Environment& env);
// Same, from averaged cluster-measured times (one per task, terminals included).
std::vector<DeviceTimes> mobile_processing_profile(std::span<const double> cluster_seconds,
                                                   const ClusterSpec& cluster, const Environment& env);

// ---- synthetic corpus ----------------------------------------------------

struct IntRange {
    int lo;
    int hi;
};

struct GenParams {
    IntRange n_tasks{18, 28};      // offloadable tasks before augmentation
    bool triangular_count = true;  // peak mid-range instead of uniform
    IntRange layers{3, 8};
    int max_width = 8;
    double extra_edge_prob = 0.15;  // per pair of tasks in different layers
    // Per-task cluster time, log-uniform.
    double cluster_seconds_min = 0.5;
    double cluster_seconds_max = 20.0;
    // Per-task data structure size, log-uniform.
    double mem_bytes_min = 2.0e5;
    double mem_bytes_max = 1.0e8;
    ClusterSpec cluster = alibaba_sccg5();
    std::uint64_t seed = 1;
};

// Throws std::invalid_argument when the shape knobs cannot fit the task range.
void require_valid(const GenParams& params);

// Layered random DAG, terminals added. Deterministic in params (seed included).
DagApp generate_dag(const GenParams& params);

// Raw graph (before terminals) as generate_dag builds it.
RawGraph generate_raw_graph(const GenParams& params);

}  // namespace flexdo
