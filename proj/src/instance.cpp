#include "evac/instance.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace evac {

using nlohmann::json;

namespace {

Rat rat_from_json(const json& j, const std::string& what) {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(Int(j.get<long long>()));
    if (j.is_number_float()) return rat_from_double(j.get<double>());
    throw GraphError(what + ": expected a number or numeric string");
}

BehaviorSpec behavior_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "dbm") {
        std::vector<BehaviorSpec::Delay> delays;
        for (const auto& d : j.at("delays"))
            delays.push_back({d.at("tau").get<int>(), rat_from_json(d.at("alpha"), "alpha")});
        return BehaviorSpec::dbm(std::move(delays));
    }
    if (type == "nebm")
        return BehaviorSpec::nebm(rat_from_json(j.at("alpha"), "alpha"));
    throw GraphError("unknown behavior type '" + type + "'");
}

json behavior_to_json(const BehaviorSpec& spec) {
    json j;
    if (spec.kind == BehaviorSpec::Kind::Dbm) {
        j["type"] = "dbm";
        j["delays"] = json::array();
        for (const auto& d : spec.delays)
            j["delays"].push_back({{"tau", d.tau}, {"alpha", rat_to_string(d.alpha)}});
    } else {
        j["type"] = "nebm";
        j["alpha"] = rat_to_string(spec.alpha);
    }
    return j;
}

}  // namespace

std::optional<int> Instance::find_person(const std::string& name) const {
    for (int i = 0; i < (int)person_names.size(); ++i)
        if (person_names[i] == name) return i;
    return std::nullopt;
}

void Instance::check() const {
    graph.check_planning_instance(n_people());
    if (t_max < 0) throw GraphError("t_max must be >= 0");
    if (deadline < 0 || deadline > t_max)
        throw GraphError("deadline must lie in [0, t_max]");
    if ((int)s0.at.size() != n_people())
        throw GraphError("initial state must place every person exactly once");
    for (int p = 0; p < n_people(); ++p) {
        const Loc& l = s0.at[p];
        bool ok = l.is_vertex() ? (l.id >= 0 && l.id < graph.n_vertices())
                                : (l.id >= 0 && l.id < graph.n_edges());
        if (!ok)
            throw GraphError("person '" + person_names[p] + "' placed on unknown location");
    }
    if (behavior) behavior->check();
}

Instance parse_instance(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw GraphError(origin + ": malformed document: " + e.what());
    }
    try {
        Instance inst;
        for (const auto& v : j.at("vertices")) {
            inst.graph.add_vertex(v.at("id").get<std::string>(),
                                  v.at("capacity").get<long long>(),
                                  v.value("exit", false));
        }
        for (const auto& e : j.at("edges")) {
            auto u = inst.graph.find_vertex(e.at("u").get<std::string>());
            auto v = inst.graph.find_vertex(e.at("v").get<std::string>());
            if (!u) throw GraphError("edge endpoint '" + e.at("u").get<std::string>() +
                                     "' is not a vertex");
            if (!v) throw GraphError("edge endpoint '" + e.at("v").get<std::string>() +
                                     "' is not a vertex");
            inst.graph.add_edge(*u, *v, e.at("capacity").get<long long>(),
                                e.at("travel_time").get<int>());
        }
        for (const auto& p : j.value("people", json::array())) {
            std::string at = p.at("at").get<std::string>();
            auto loc = inst.graph.parse_loc(at);
            if (!loc)
                throw GraphError("person '" + p.at("id").get<std::string>() +
                                 "' placed on unknown location '" + at + "'");
            inst.person_names.push_back(p.at("id").get<std::string>());
            inst.s0.at.push_back(*loc);
        }
        inst.t_max = j.at("t_max").get<int>();
        inst.deadline = j.value("deadline", inst.t_max);
        if (j.contains("behavior")) inst.behavior = behavior_from_json(j.at("behavior"));
        inst.check();
        return inst;
    } catch (const json::exception& e) {
        throw GraphError(origin + ": malformed document: " + e.what());
    } catch (const GraphError& e) {
        throw GraphError(origin + ": " + e.what());
    }
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open instance file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str(), path);
}

std::string instance_to_json(const Instance& inst) {
    json j;
    j["vertices"] = json::array();
    for (int v = 0; v < inst.graph.n_vertices(); ++v) {
        json jv = {{"id", inst.graph.vertex_name(v)},
                   {"capacity", inst.graph.vertex_capacity(v)}};
        if (inst.graph.is_exit(v)) jv["exit"] = true;
        j["vertices"].push_back(jv);
    }
    j["edges"] = json::array();
    for (const EdgeRec& e : inst.graph.edges())
        j["edges"].push_back({{"u", inst.graph.vertex_name(e.u)},
                              {"v", inst.graph.vertex_name(e.v)},
                              {"capacity", e.capacity},
                              {"travel_time", e.travel_time}});
    j["people"] = json::array();
    for (int p = 0; p < inst.n_people(); ++p)
        j["people"].push_back({{"id", inst.person_names[p]},
                               {"at", inst.graph.loc_name(inst.s0.at[p])}});
    j["t_max"] = inst.t_max;
    j["deadline"] = inst.deadline;
    if (inst.behavior) j["behavior"] = behavior_to_json(*inst.behavior);
    return j.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw GraphError("cannot write instance file '" + path + "'");
    out << instance_to_json(inst);
}

}  // namespace evac
