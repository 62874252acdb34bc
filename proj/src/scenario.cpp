#include "depas/scenario.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace depas {

using nlohmann::json;

void ScenarioConfig::validate() const
{
    if (!(duration > 0.0)) {
        throw std::invalid_argument("duration: must be > 0");
    }
    if (runs == 0 && seeds.empty()) {
        throw std::invalid_argument("runs: must be > 0");
    }
    if (initial_nodes == 0) {
        throw std::invalid_argument("initial_nodes: must be > 0");
    }
    if (!(warmup >= 0.0)) {
        throw std::invalid_argument("warmup: must be >= 0");
    }
    if (!(mean_service_time > 0.0)) {
        throw std::invalid_argument("service.mean_time: must be > 0");
    }
    scaler.validate();
    admission.validate();
    if (overlay.degree == 0) {
        throw std::invalid_argument("overlay.degree: must be > 0");
    }
    if (!(overlay.period > 0.0)) {
        throw std::invalid_argument("overlay.period: must be > 0");
    }
    if (overlay.max_age < 0) {
        throw std::invalid_argument("overlay.max_age: must be >= 0");
    }
    if (!(balance_period > 0.0)) {
        throw std::invalid_argument("balancer.period: must be > 0");
    }
    if (!(latency.seconds >= 0.0)) {
        throw std::invalid_argument("network.latency: must be >= 0");
    }
    cloud.validate();
    capacity.validate();
    try {
        workload.transform.validate();
    } catch (const ParseError& e) {
        throw std::invalid_argument(e.what());
    }
    if (workload.constant_rate && !(*workload.constant_rate >= 0.0)) {
        throw std::invalid_argument("workload.constant_rate: must be >= 0");
    }
    churn.validate();
    for (const auto& d : disruptions) {
        d.validate();
    }
}

std::vector<std::uint64_t> ScenarioConfig::run_seeds() const
{
    if (!seeds.empty()) {
        return seeds;
    }
    std::vector<std::uint64_t> out;
    out.reserve(runs);
    for (std::size_t i = 0; i < runs; ++i) {
        out.push_back(splitmix64(seed + i));
    }
    return out;
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!obj.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) {
            throw ParseError((where.empty() ? key : where + "." + key) + ": unknown key");
        }
    }
}

std::string join(const std::string& where, const char* key)
{
    return where.empty() ? std::string(key) : where + "." + key;
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) {
        return;
    }
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) {
                throw ParseError(join(where, key) + ": expected true or false");
            }
        } else if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) {
                throw ParseError(join(where, key) + ": expected a number");
            }
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned()) {
                throw ParseError(join(where, key) + ": expected a non-negative integer");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) {
                throw ParseError(join(where, key) + ": expected an integer");
            }
        }
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(join(where, key) + ": wrong type");
    }
}

ChurnParams churn_preset(const std::string& name)
{
    ChurnParams c;
    c.period = 10.0;
    if (name == "soft") {
        c.p_fail = 0.05;
    } else if (name == "heavy") {
        c.p_fail = 0.10;
    } else if (name == "none") {
        c.p_fail = 0.0;
    } else {
        throw ParseError("churn: unknown preset '" + name + "' (expected soft, heavy or none)");
    }
    return c;
}

json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source_name)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    check_keys(root,
               {"base", "name", "duration", "seed", "runs", "seeds", "initial_nodes", "warmup", "track_connectivity",
                "service", "scaler", "admission", "overlay", "balancer", "network", "cloud", "capacity", "workload",
                "churn", "disruptions"},
               "");

    ScenarioConfig c;
    if (auto it = root.find("base"); it != root.end()) {
        if (!it->is_string()) {
            throw ParseError("base: expected a preset name");
        }
        auto p = preset(it->get<std::string>());
        if (!p) {
            throw ParseError("base: unknown preset '" + it->get<std::string>() + "'");
        }
        c = *p;
    }
    read(root, "name", c.name, "");
    read(root, "duration", c.duration, "");
    read(root, "seed", c.seed, "");
    read(root, "runs", c.runs, "");
    read(root, "seeds", c.seeds, "");
    read(root, "initial_nodes", c.initial_nodes, "");
    read(root, "warmup", c.warmup, "");
    read(root, "track_connectivity", c.track_connectivity, "");

    if (auto it = root.find("service"); it != root.end()) {
        check_keys(*it, {"mean_time"}, "service");
        read(*it, "mean_time", c.mean_service_time, "service");
    }
    if (auto it = root.find("scaler"); it != root.end()) {
        check_keys(*it, {"enabled", "l_min", "l_max", "l_des", "period", "window"}, "scaler");
        read(*it, "enabled", c.scaling_enabled, "scaler");
        read(*it, "l_min", c.scaler.l_min, "scaler");
        read(*it, "l_max", c.scaler.l_max, "scaler");
        if (it->contains("l_des")) {
            read(*it, "l_des", c.scaler.l_des, "scaler");
        } else if (it->contains("l_min") || it->contains("l_max")) {
            c.scaler.l_des = (c.scaler.l_min + c.scaler.l_max) / 2.0;
        }
        read(*it, "period", c.scaler.period, "scaler");
        read(*it, "window", c.scaler.window, "scaler");
    }
    if (auto it = root.find("admission"); it != root.end()) {
        check_keys(*it, {"soft_limit", "hard_limit", "forward_limit", "max_pending_time"}, "admission");
        read(*it, "soft_limit", c.admission.soft_limit, "admission");
        read(*it, "hard_limit", c.admission.hard_limit, "admission");
        read(*it, "forward_limit", c.admission.forward_limit, "admission");
        read(*it, "max_pending_time", c.admission.max_pending_time, "admission");
    }
    if (auto it = root.find("overlay"); it != root.end()) {
        check_keys(*it, {"degree", "period", "max_age", "heal", "swap"}, "overlay");
        read(*it, "degree", c.overlay.degree, "overlay");
        read(*it, "period", c.overlay.period, "overlay");
        read(*it, "max_age", c.overlay.max_age, "overlay");
        read(*it, "heal", c.overlay.heal, "overlay");
        read(*it, "swap", c.overlay.swap, "overlay");
    }
    if (auto it = root.find("balancer"); it != root.end()) {
        check_keys(*it, {"enabled", "period"}, "balancer");
        read(*it, "enabled", c.dimension_exchange, "balancer");
        read(*it, "period", c.balance_period, "balancer");
    }
    if (auto it = root.find("network"); it != root.end()) {
        check_keys(*it, {"latency"}, "network");
        read(*it, "latency", c.latency.seconds, "network");
    }
    if (auto it = root.find("cloud"); it != root.end()) {
        check_keys(*it,
                   {"providers", "boot_delay", "min_nodes", "max_nodes", "dns_entries", "registration_probability"},
                   "cloud");
        read(*it, "providers", c.cloud.providers, "cloud");
        read(*it, "boot_delay", c.cloud.boot_delay, "cloud");
        read(*it, "min_nodes", c.cloud.min_nodes, "cloud");
        read(*it, "max_nodes", c.cloud.max_nodes, "cloud");
        read(*it, "dns_entries", c.cloud.dns_entries, "cloud");
        read(*it, "registration_probability", c.cloud.registration_probability, "cloud");
    }
    if (auto it = root.find("capacity"); it != root.end()) {
        if (!it->is_array()) {
            throw ParseError("capacity: expected a list of {probability, capacity}");
        }
        c.capacity.classes.clear();
        for (const auto& cls : *it) {
            check_keys(cls, {"probability", "capacity"}, "capacity[]");
            CapacityClass k;
            read(cls, "probability", k.probability, "capacity[]");
            read(cls, "capacity", k.capacity, "capacity[]");
            c.capacity.classes.push_back(k);
        }
    }
    if (auto it = root.find("workload"); it != root.end()) {
        check_keys(*it, {"trace", "constant_rate", "rate_scale", "time_scale"}, "workload");
        read(*it, "trace", c.workload.trace, "workload");
        if (auto r = it->find("constant_rate"); r != it->end()) {
            if (r->is_null()) {
                c.workload.constant_rate.reset();
            } else {
                double v = 0.0;
                read(*it, "constant_rate", v, "workload");
                c.workload.constant_rate = v;
            }
        }
        read(*it, "rate_scale", c.workload.transform.rate_scale, "workload");
        read(*it, "time_scale", c.workload.transform.time_scale, "workload");
    }
    if (auto it = root.find("churn"); it != root.end()) {
        if (it->is_string()) {
            c.churn = churn_preset(it->get<std::string>());
        } else {
            check_keys(*it, {"p_fail", "period", "start", "end"}, "churn");
            read(*it, "p_fail", c.churn.p_fail, "churn");
            read(*it, "period", c.churn.period, "churn");
            read(*it, "start", c.churn.start, "churn");
            if (auto e = it->find("end"); e != it->end()) {
                if (e->is_null()) {
                    c.churn.end = std::numeric_limits<double>::infinity();
                } else {
                    read(*it, "end", c.churn.end, "churn");
                }
            }
        }
    }
    if (auto it = root.find("disruptions"); it != root.end()) {
        if (!it->is_array()) {
            throw ParseError("disruptions: expected a list of {at, fraction}");
        }
        c.disruptions.clear();
        for (const auto& d : *it) {
            check_keys(d, {"at", "fraction"}, "disruptions[]");
            DisruptiveEvent ev;
            read(d, "at", ev.at, "disruptions[]");
            read(d, "fraction", ev.fraction, "disruptions[]");
            c.disruptions.push_back(ev);
        }
    }

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    return c;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_config(const ScenarioConfig& c)
{
    json root;
    root["name"] = c.name;
    root["duration"] = c.duration;
    root["seed"] = c.seed;
    root["runs"] = c.runs;
    root["seeds"] = c.seeds;
    root["initial_nodes"] = c.initial_nodes;
    root["warmup"] = c.warmup;
    root["track_connectivity"] = c.track_connectivity;
    root["service"] = {{"mean_time", c.mean_service_time}};
    root["scaler"] = {{"enabled", c.scaling_enabled}, {"l_min", c.scaler.l_min},   {"l_max", c.scaler.l_max},
                      {"l_des", c.scaler.l_des},      {"period", c.scaler.period}, {"window", c.scaler.window}};
    root["admission"] = {{"soft_limit", c.admission.soft_limit},
                         {"hard_limit", c.admission.hard_limit},
                         {"forward_limit", c.admission.forward_limit},
                         {"max_pending_time", c.admission.max_pending_time}};
    root["overlay"] = {{"degree", c.overlay.degree},
                       {"period", c.overlay.period},
                       {"max_age", c.overlay.max_age},
                       {"heal", c.overlay.heal},
                       {"swap", c.overlay.swap}};
    root["balancer"] = {{"enabled", c.dimension_exchange}, {"period", c.balance_period}};
    root["network"] = {{"latency", c.latency.seconds}};
    root["cloud"] = {{"providers", c.cloud.providers},
                     {"boot_delay", c.cloud.boot_delay},
                     {"min_nodes", c.cloud.min_nodes},
                     {"max_nodes", c.cloud.max_nodes},
                     {"dns_entries", c.cloud.dns_entries},
                     {"registration_probability", c.cloud.registration_probability}};
    json classes = json::array();
    for (const auto& k : c.capacity.classes) {
        classes.push_back({{"probability", k.probability}, {"capacity", k.capacity}});
    }
    root["capacity"] = classes;
    root["workload"] = {{"trace", c.workload.trace},
                        {"constant_rate", c.workload.constant_rate ? json(*c.workload.constant_rate) : json(nullptr)},
                        {"rate_scale", c.workload.transform.rate_scale},
                        {"time_scale", c.workload.transform.time_scale}};
    root["churn"] = {{"p_fail", c.churn.p_fail},
                     {"period", c.churn.period},
                     {"start", c.churn.start},
                     {"end", finite_or_null(c.churn.end)}};
    json disruptions = json::array();
    for (const auto& d : c.disruptions) {
        disruptions.push_back({{"at", d.at}, {"fraction", d.fraction}});
    }
    root["disruptions"] = disruptions;
    return root.dump(2) + "\n";
}

CapacityDistribution reference_capacity_mixture()
{
    return {{{0.5, 0.5}, {0.3, 1.83}, {0.2, 1.0}}};
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"reference",  "homogeneous",     "extreme-unbalanced", "churn-soft",
                                                "churn-heavy", "disruptive-soft", "disruptive-heavy"};
    return names;
}

std::optional<ScenarioConfig> preset(const std::string& name)
{
    ScenarioConfig c;
    c.name = name;
    c.duration = 2700.0;
    c.runs = 8;
    c.capacity = reference_capacity_mixture();
    c.workload.trace = "builtin:town-hall";
    c.workload.transform = {1.0, town_hall_time_scale};

    if (name == "reference") {
        return c;
    }
    if (name == "homogeneous") {
        c.capacity = CapacityDistribution::homogeneous(1.0);
        return c;
    }
    if (name == "extreme-unbalanced") {
        c.capacity = {{{0.5, 0.1}, {0.5, 1.9}}};
        return c;
    }
    if (name == "churn-soft" || name == "churn-heavy") {
        c.churn = churn_preset(name == "churn-soft" ? "soft" : "heavy");
        c.track_connectivity = true;
        return c;
    }
    if (name == "disruptive-soft" || name == "disruptive-heavy") {
        c.duration = 450.0;
        // 720 req/s at desk scale; rate_scale 10 gives the full 7200 req/s.
        c.workload.constant_rate = 720.0;
        c.workload.transform = {1.0, 1.0};
        c.disruptions = {{200.0, name == "disruptive-soft" ? 0.3 : 0.6}};
        return c;
    }
    return std::nullopt;
}

RateTrace resolve_trace(const ScenarioConfig& config)
{
    const auto& w = config.workload;
    if (w.constant_rate) {
        return RateTrace::constant(*w.constant_rate, config.duration / w.transform.time_scale);
    }
    if (w.trace == "builtin:town-hall") {
        return synthetic_town_hall_trace();
    }
    return load_trace_file(w.trace);
}

} // namespace depas
