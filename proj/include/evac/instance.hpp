#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evac/behavior_spec.hpp"
#include "evac/graph.hpp"

namespace evac {

// Initial state s0: one location per person.
struct State {
    std::vector<Loc> at;  // indexed by person id
};

// A full planning instance: graph, people, horizon, deadline, behavior.
struct Instance {
    BuildingGraph graph;
    std::vector<std::string> person_names;
    State s0;
    int t_max = 0;
    int deadline = 0;
    std::optional<BehaviorSpec> behavior;

    int n_people() const { return (int)person_names.size(); }
    std::optional<int> find_person(const std::string& name) const;
    void check() const;  // structure + planning-instance invariants + s0 validity
};

Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& json_text, const std::string& origin);
std::string instance_to_json(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace evac
