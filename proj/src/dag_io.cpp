#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "flexdo/ingest.hpp"

namespace flexdo {

using nlohmann::json;

namespace {

const json& require_key(const json& obj, const std::string& path, const char* key, const char* meaning) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw FormatError(path + "/" + key, std::string("missing required key (") + meaning + ")");
    }
    return *it;
}

std::uint64_t as_unsigned(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw FormatError(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw FormatError(path, "expected an integer");
    return v.get<std::int64_t>();
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw FormatError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw FormatError(path, "expected a finite number");
    return x;
}

TaskId as_task_id(const json& v, const std::string& path) {
    const auto id = as_unsigned(v, path);
    if (id > 0xFFFFFFFFULL) throw FormatError(path, "task id out of range");
    return static_cast<TaskId>(id);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace

DagApp parse_dag_file(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FormatError("", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("", "top level must be an object");

    const TaskId initial = as_task_id(require_key(doc, "", "initial", "the DAG must designate its initial task"), "/initial");
    const TaskId ending = as_task_id(require_key(doc, "", "ending", "the DAG must designate its ending task"), "/ending");

    const json& jtasks = require_key(doc, "", "tasks", "list of tasks");
    if (!jtasks.is_array()) throw FormatError("/tasks", "expected an array");
    std::vector<Task> tasks;
    tasks.reserve(jtasks.size());
    for (std::size_t i = 0; i < jtasks.size(); ++i) {
        const std::string path = "/tasks/" + std::to_string(i);
        const json& jt = jtasks[i];
        if (!jt.is_object()) throw FormatError(path, "expected an object");
        Task t;
        t.id = as_task_id(require_key(jt, path, "id", "task id"), path + "/id");
        t.work = as_number(require_key(jt, path, "work", "operation count"), path + "/work");
        t.mem_bytes = jt.contains("mem_bytes") ? as_integer(jt["mem_bytes"], path + "/mem_bytes") : 0;
        tasks.push_back(t);
    }
    std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });

    const json& jedges = require_key(doc, "", "edges", "list of edges");
    if (!jedges.is_array()) throw FormatError("/edges", "expected an array");
    std::map<std::pair<TaskId, TaskId>, std::int64_t> merged;
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string path = "/edges/" + std::to_string(i);
        const json& je = jedges[i];
        if (!je.is_object()) throw FormatError(path, "expected an object");
        const TaskId src = as_task_id(require_key(je, path, "src", "producing task"), path + "/src");
        const TaskId dst = as_task_id(require_key(je, path, "dst", "consuming task"), path + "/dst");
        const std::int64_t bytes = as_integer(require_key(je, path, "data_bytes", "payload"), path + "/data_bytes");
        merged[{src, dst}] += bytes;
    }
    std::vector<Edge> edges;
    edges.reserve(merged.size());
    for (const auto& [key, bytes] : merged) edges.push_back({key.first, key.second, bytes});

    return DagApp(std::move(tasks), std::move(edges), initial, ending);
}

std::string write_dag_file(const DagApp& dag) {
    json doc;
    doc["initial"] = dag.initial();
    doc["ending"] = dag.ending();
    json tasks = json::array();
    for (const auto& t : dag.tasks()) {
        tasks.push_back({{"id", t.id}, {"work", t.work}, {"mem_bytes", t.mem_bytes}});
    }
    json edges = json::array();
    for (const auto& e : dag.edges()) {
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"data_bytes", e.data_bytes}});
    }
    doc["tasks"] = std::move(tasks);
    doc["edges"] = std::move(edges);
    return doc.dump(1) + "\n";
}

DagApp load_dag(const std::string& path) {
    DagApp dag = parse_dag_file(read_file(path));
    require_valid(dag);
    return dag;
}

void save_dag(const std::string& path, const DagApp& dag) {
    write_file(path, write_dag_file(dag));
}

// ---- hardware profiles ---------------------------------------------------

namespace {

DeviceSpec parse_device(const json& j, const std::string& path, const DeviceSpec& fallback) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "snapdragon-865") return snapdragon_865();
        if (name == "xeon-d2100") return xeon_d2100();
        throw FormatError(path, "unknown device preset '" + name + "'");
    }
    if (!j.is_object()) throw FormatError(path, "expected an object or a preset name");
    DeviceSpec d = fallback;
    if (j.contains("cpus")) {
        const json& c = j["cpus"];
        if (c.is_string()) {
            try {
                d.cpus = CpuCount::parse(c.get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw FormatError(path + "/cpus", e.what());
            }
        } else {
            const auto n = as_integer(c, path + "/cpus");
            if (n <= 0 || n > 1'000'000) throw FormatError(path + "/cpus", "expected a positive count or \"inf\"");
            d.cpus = CpuCount::of(static_cast<int>(n));
        }
    }
    if (j.contains("clock_hz")) d.clock_hz = as_number(j["clock_hz"], path + "/clock_hz");
    if (j.contains("ops_per_cycle")) d.ops_per_cycle = as_number(j["ops_per_cycle"], path + "/ops_per_cycle");
    if (!(d.clock_hz > 0) || !(d.ops_per_cycle > 0)) throw FormatError(path, "clock and ops/cycle must be positive");
    return d;
}

json device_json(const DeviceSpec& d) {
    json j;
    if (d.cpus.is_unlimited()) {
        j["cpus"] = "inf";
    } else {
        j["cpus"] = d.cpus.value();
    }
    j["clock_hz"] = d.clock_hz;
    j["ops_per_cycle"] = d.ops_per_cycle;
    return j;
}

}  // namespace

HardwareProfile parse_hardware_profile(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FormatError("", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("", "top level must be an object");
    HardwareProfile p{alibaba_sccg5(), default_environment()};
    if (doc.contains("cluster")) {
        const json& c = doc["cluster"];
        if (c.is_string()) {
            if (c.get<std::string>() != "alibaba-sccg5") throw FormatError("/cluster", "unknown cluster preset");
        } else if (c.is_object()) {
            if (c.contains("clock_hz")) p.cluster.clock_hz = as_number(c["clock_hz"], "/cluster/clock_hz");
            if (c.contains("ops_per_cycle")) {
                p.cluster.ops_per_cycle = as_number(c["ops_per_cycle"], "/cluster/ops_per_cycle");
            }
            if (!(p.cluster.clock_hz > 0) || !(p.cluster.ops_per_cycle > 0)) {
                throw FormatError("/cluster", "clock and ops/cycle must be positive");
            }
        } else {
            throw FormatError("/cluster", "expected an object or a preset name");
        }
    }
    if (doc.contains("mobile")) p.env.mobile = parse_device(doc["mobile"], "/mobile", p.env.mobile);
    if (doc.contains("edge")) p.env.edge = parse_device(doc["edge"], "/edge", p.env.edge);
    if (doc.contains("rate_mbps")) {
        const double mbps = as_number(doc["rate_mbps"], "/rate_mbps");
        if (!(mbps > 0)) throw FormatError("/rate_mbps", "rate must be positive");
        p.env.channel_rate = mbps_to_bytes_per_second(mbps);
    }
    return p;
}

std::string write_hardware_profile(const HardwareProfile& profile) {
    json doc;
    doc["cluster"] = {{"clock_hz", profile.cluster.clock_hz}, {"ops_per_cycle", profile.cluster.ops_per_cycle}};
    doc["mobile"] = device_json(profile.env.mobile);
    doc["edge"] = device_json(profile.env.edge);
    doc["rate_mbps"] = profile.env.channel_rate / kBytesPerMbps;
    return doc.dump(2) + "\n";
}

}  // namespace flexdo
