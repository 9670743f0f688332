#include "mgrsc/case_io.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mgrsc/errors.hpp"

namespace mgrsc {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json& require(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(ctx + ": missing required key '" + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& ctx) {
    if (!v.is_number()) throw ValidationError(ctx + ": expected a number");
    return v.get<double>();
}

double num_field(const json& obj, const char* key, const std::string& ctx) {
    return as_number(require(obj, key, ctx), ctx + "." + key);
}

double num_field_or(const json& obj, const char* key, double fallback, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as_number(*it, ctx + "." + key);
}

int int_field(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_number_integer()) throw ValidationError(ctx + "." + key + ": expected an integer");
    return v.get<int>();
}

std::string str_field(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_string()) throw ValidationError(ctx + "." + key + ": expected a string");
    return v.get<std::string>();
}

BusKind parse_bus_kind(const std::string& s, const std::string& ctx) {
    if (s == "pcc") return BusKind::PCC;
    if (s == "pq") return BusKind::PQ;
    if (s == "pv") return BusKind::PV;
    if (s == "slack") return BusKind::SLACK;
    throw ValidationError(ctx + ": unknown bus kind '" + s + "'");
}

const char* bus_kind_name(BusKind k) {
    switch (k) {
        case BusKind::PCC: return "pcc";
        case BusKind::PQ: return "pq";
        case BusKind::PV: return "pv";
        case BusKind::SLACK: return "slack";
    }
    return "pq";
}

DeviceKind parse_device_kind(const std::string& s, const std::string& ctx) {
    if (s == "pv") return DeviceKind::PV;
    if (s == "wt") return DeviceKind::WT;
    if (s == "ev") return DeviceKind::EV;
    throw ValidationError(ctx + ": unknown device type '" + s + "'");
}

const char* device_kind_name(DeviceKind k) {
    switch (k) {
        case DeviceKind::PV: return "pv";
        case DeviceKind::WT: return "wt";
        case DeviceKind::EV: return "ev";
    }
    return "pv";
}

}  // namespace

Network case_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("case: top level must be a JSON object");
    const double s_base = num_field(doc, "s_base_mva", "case");
    const double v_base = num_field(doc, "v_base_kv", "case");
    if (s_base <= 0.0) throw ValidationError("case.s_base_mva must be positive");
    if (v_base <= 0.0) throw ValidationError("case.v_base_kv must be positive");
    const double zbase = v_base * v_base / s_base;
    // Three-phase current base in amps for ampacity conversion.
    const double i_base_a = s_base * 1e6 / (std::sqrt(3.0) * v_base * 1e3);

    const json& jbuses = require(doc, "buses", "case");
    if (!jbuses.is_array() || jbuses.empty())
        throw ValidationError("case.buses must be a non-empty array");
    std::vector<Bus> buses;
    for (size_t i = 0; i < jbuses.size(); ++i) {
        const std::string ctx = "case.buses[" + std::to_string(i) + "]";
        const json& jb = jbuses[i];
        Bus b;
        b.id = int_field(jb, "id", ctx);
        b.kind = parse_bus_kind(str_field(jb, "kind", ctx), ctx + ".kind");
        b.base_load_p = num_field_or(jb, "load_p_mw", 0.0, ctx) / s_base;
        b.base_load_q = num_field_or(jb, "load_q_mvar", 0.0, ctx) / s_base;
        b.v_min = num_field_or(jb, "v_min", 0.9, ctx);
        b.v_max = num_field_or(jb, "v_max", 1.1, ctx);
        buses.push_back(b);
    }

    const json& jbranches = require(doc, "branches", "case");
    if (!jbranches.is_array()) throw ValidationError("case.branches must be an array");
    std::vector<Branch> branches;
    for (size_t i = 0; i < jbranches.size(); ++i) {
        const std::string ctx = "case.branches[" + std::to_string(i) + "]";
        const json& jb = jbranches[i];
        Branch br;
        br.from_bus = int_field(jb, "from", ctx);
        br.to_bus = int_field(jb, "to", ctx);
        br.r = num_field(jb, "r_ohm", ctx) / zbase;
        br.x = num_field(jb, "x_ohm", ctx) / zbase;
        br.i_max = num_field_or(jb, "i_max_a", 0.0, ctx) / i_base_a;
        branches.push_back(br);
    }

    std::vector<Generator> gens;
    if (auto it = doc.find("generators"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("case.generators must be an array");
        for (size_t i = 0; i < it->size(); ++i) {
            const std::string ctx = "case.generators[" + std::to_string(i) + "]";
            const json& jg = (*it)[i];
            Generator g;
            g.bus = int_field(jg, "bus", ctx);
            g.p_set = num_field_or(jg, "p_set_mw", 0.0, ctx) / s_base;
            g.p_min = num_field(jg, "p_min_mw", ctx) / s_base;
            g.p_max = num_field(jg, "p_max_mw", ctx) / s_base;
            g.q_min = num_field(jg, "q_min_mvar", ctx) / s_base;
            g.q_max = num_field(jg, "q_max_mvar", ctx) / s_base;
            g.power_factor = num_field_or(jg, "power_factor", 1.0, ctx);
            g.dispatchable = jg.value("dispatchable", true);
            gens.push_back(g);
        }
    }

    std::vector<BessUnit> bess;
    if (auto it = doc.find("bess"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("case.bess must be an array");
        for (size_t i = 0; i < it->size(); ++i) {
            const std::string ctx = "case.bess[" + std::to_string(i) + "]";
            const json& jb = (*it)[i];
            BessUnit u;
            u.bus = int_field(jb, "bus", ctx);
            u.p_min = num_field(jb, "p_min_mw", ctx) / s_base;
            u.p_max = num_field(jb, "p_max_mw", ctx) / s_base;
            u.capacity = num_field(jb, "capacity_mwh", ctx) / s_base;
            u.soc = num_field(jb, "soc_mwh", ctx) / s_base;
            bess.push_back(u);
        }
    }

    std::vector<RandomDevice> devices;
    if (auto it = doc.find("random_devices"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("case.random_devices must be an array");
        for (size_t i = 0; i < it->size(); ++i) {
            const std::string ctx = "case.random_devices[" + std::to_string(i) + "]";
            const json& jd = (*it)[i];
            RandomDevice d;
            d.id = str_field(jd, "id", ctx);
            d.kind = parse_device_kind(str_field(jd, "type", ctx), ctx + ".type");
            d.bus = int_field(jd, "bus", ctx);
            d.rating = num_field(jd, "rating_mw", ctx) / s_base;
            d.power_factor = num_field_or(jd, "power_factor", 1.0, ctx);
            d.g_set = num_field_or(jd, "g_set_wm2", d.g_set, ctx);
            d.g_std = num_field_or(jd, "g_std_wm2", d.g_std, ctx);
            d.v_in = num_field_or(jd, "v_in_ms", d.v_in, ctx);
            d.v_rated = num_field_or(jd, "v_rated_ms", d.v_rated, ctx);
            d.v_out = num_field_or(jd, "v_out_ms", d.v_out, ctx);
            devices.push_back(d);
        }
    }

    Network net(std::move(buses), std::move(branches), std::move(gens), std::move(bess),
                std::move(devices), s_base, v_base);

    std::vector<int> dispatch;
    if (auto it = doc.find("dispatch_buses"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("case.dispatch_buses must be an array");
        for (const json& v : *it) {
            if (!v.is_number_integer())
                throw ValidationError("case.dispatch_buses entries must be integers");
            dispatch.push_back(v.get<int>());
        }
    } else {
        for (const Generator& g : net.generators())
            if (g.dispatchable) dispatch.push_back(g.bus);
    }
    if (dispatch.empty())
        throw ValidationError("case: no dispatchable generators to form a transfer direction");
    return net.with_direction(build_direction(net, dispatch));
}

ordered_json case_to_json(const Network& net, const std::string& id) {
    const double s_base = net.s_base_mva();
    const double v_base = net.v_base_kv();
    const double zbase = v_base * v_base / s_base;
    const double i_base_a = s_base * 1e6 / (std::sqrt(3.0) * v_base * 1e3);

    ordered_json doc;
    if (!id.empty()) doc["id"] = id;
    doc["s_base_mva"] = s_base;
    doc["v_base_kv"] = v_base;

    doc["buses"] = ordered_json::array();
    for (const Bus& b : net.buses()) {
        ordered_json jb;
        jb["id"] = b.id;
        jb["kind"] = bus_kind_name(b.kind);
        jb["load_p_mw"] = b.base_load_p * s_base;
        jb["load_q_mvar"] = b.base_load_q * s_base;
        jb["v_min"] = b.v_min;
        jb["v_max"] = b.v_max;
        doc["buses"].push_back(jb);
    }

    doc["branches"] = ordered_json::array();
    for (const Branch& br : net.branches()) {
        ordered_json jb;
        jb["from"] = br.from_bus;
        jb["to"] = br.to_bus;
        jb["r_ohm"] = br.r * zbase;
        jb["x_ohm"] = br.x * zbase;
        jb["i_max_a"] = br.i_max * i_base_a;
        doc["branches"].push_back(jb);
    }

    doc["generators"] = ordered_json::array();
    for (const Generator& g : net.generators()) {
        ordered_json jg;
        jg["bus"] = g.bus;
        jg["p_set_mw"] = g.p_set * s_base;
        jg["p_min_mw"] = g.p_min * s_base;
        jg["p_max_mw"] = g.p_max * s_base;
        jg["q_min_mvar"] = g.q_min * s_base;
        jg["q_max_mvar"] = g.q_max * s_base;
        jg["power_factor"] = g.power_factor;
        jg["dispatchable"] = g.dispatchable;
        doc["generators"].push_back(jg);
    }

    doc["bess"] = ordered_json::array();
    for (const BessUnit& u : net.bess_units()) {
        ordered_json jb;
        jb["bus"] = u.bus;
        jb["p_min_mw"] = u.p_min * s_base;
        jb["p_max_mw"] = u.p_max * s_base;
        jb["capacity_mwh"] = u.capacity * s_base;
        jb["soc_mwh"] = u.soc * s_base;
        doc["bess"].push_back(jb);
    }

    doc["random_devices"] = ordered_json::array();
    for (const RandomDevice& d : net.devices()) {
        ordered_json jd;
        jd["id"] = d.id;
        jd["type"] = device_kind_name(d.kind);
        jd["bus"] = d.bus;
        jd["rating_mw"] = d.rating * s_base;
        jd["power_factor"] = d.power_factor;
        if (d.kind == DeviceKind::PV) {
            jd["g_set_wm2"] = d.g_set;
            jd["g_std_wm2"] = d.g_std;
        } else if (d.kind == DeviceKind::WT) {
            jd["v_in_ms"] = d.v_in;
            jd["v_rated_ms"] = d.v_rated;
            jd["v_out_ms"] = d.v_out;
        }
        doc["random_devices"].push_back(jd);
    }

    if (net.has_direction()) {
        // Recover the dispatch set from equal positive generation increments.
        ordered_json buses = ordered_json::array();
        const TransferDirection& dir = net.direction();
        for (int i = 0; i < net.bus_count(); ++i)
            if (dir.dp_gen[i] > 0.0) buses.push_back(net.buses()[i].id);
        doc["dispatch_buses"] = buses;
    }
    return doc;
}

Network load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open case file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("case file " + path + " is not valid JSON: " + e.what());
    }
    return case_from_json(doc);
}

void save_case_file(const Network& net, const std::string& path, const std::string& id) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write case file: " + path);
    out << case_to_json(net, id).dump(2) << "\n";
}

Network resolve_case(const std::string& spec) {
    if (is_builtin_case(spec)) return builtin_ieee33();
    return load_case_file(spec);
}

}  // namespace mgrsc
