#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "amtk/tasks.hpp"
#include "amtk/util.hpp"

namespace amtk {

using Json = nlohmann::json;

struct Unit {
    std::string id;
    std::string text;
};

struct Component {
    std::string id;
    std::string unit;   // id of the unit carrying the text
    std::string label;  // dataset-native label, canonicalized at extraction
    std::optional<std::string> stance;
};

struct Relation {
    std::string id;
    std::string source;  // component or relation id
    std::string target;  // component or relation id
    std::string type;    // dataset-native type (reb/sup/und/add/...)
};

// One dataset-native record in the unified schema. Text is stored verbatim;
// no normalization happens at ingest.
struct CorpusRecord {
    std::string id;
    std::string dataset;
    std::optional<std::string> topic;
    std::optional<std::string> stance;
    std::vector<Unit> units;
    std::vector<Component> components;
    std::vector<Relation> relations;
    std::map<std::string, std::string> extras;

    bool operator==(const CorpusRecord&) const = default;
};

inline bool operator==(const Unit& a, const Unit& b) { return a.id == b.id && a.text == b.text; }
inline bool operator==(const Component& a, const Component& b) {
    return a.id == b.id && a.unit == b.unit && a.label == b.label && a.stance == b.stance;
}
inline bool operator==(const Relation& a, const Relation& b) {
    return a.id == b.id && a.source == b.source && a.target == b.target && a.type == b.type;
}

// Checks the record invariants; returns the violation message or nullopt.
inline std::optional<std::string> validate_record(const CorpusRecord& rec) {
    if (rec.id.empty()) return "missing record id";
    if (!dataset_registered(rec.dataset)) return "unregistered dataset '" + rec.dataset + "'";
    std::set<std::string> unit_ids;
    for (const auto& u : rec.units)
        if (!unit_ids.insert(u.id).second) return "duplicate unit id '" + u.id + "'";
    std::set<std::string> referable;  // component ids + relation ids
    std::set<std::string> comp_ids;
    for (const auto& c : rec.components) {
        if (!comp_ids.insert(c.id).second) return "duplicate component id '" + c.id + "'";
        if (!c.unit.empty() && !unit_ids.count(c.unit))
            return "component '" + c.id + "' references missing unit '" + c.unit + "'";
        referable.insert(c.id);
    }
    std::set<std::string> rel_ids;
    for (const auto& r : rec.relations) {
        if (!rel_ids.insert(r.id).second) return "duplicate relation id '" + r.id + "'";
        referable.insert(r.id);
    }
    for (const auto& r : rec.relations) {
        if (!referable.count(r.source)) return "dangling relation source '" + r.source + "'";
        if (!referable.count(r.target)) return "dangling relation target '" + r.target + "'";
    }
    return std::nullopt;
}

// One classification example. gold is a set; only FD may hold more than one
// label.
struct TaskInstance {
    TaskId task = TaskId::ACC;
    std::string dataset;
    std::string id;
    std::map<std::string, std::string> inputs;
    std::vector<std::string> gold;  // kept sorted, unique

    bool operator==(const TaskInstance&) const = default;
};

inline std::optional<std::string> validate_instance(const TaskInstance& inst) {
    if (inst.id.empty()) return "missing instance id";
    if (inst.gold.empty()) return "empty gold set";
    if (inst.gold.size() > 1 && inst.task != TaskId::FD)
        return "multi-label gold outside FD";
    const auto& catalog = label_catalog(inst.task);
    for (const auto& g : inst.gold) {
        bool known = false;
        for (const auto& l : catalog)
            if (l == g) { known = true; break; }
        if (!known) return "gold label '" + g + "' not in catalog";
    }
    for (const auto& key : required_input_keys(inst.task))
        if (!inst.inputs.count(key)) return "missing required input '" + key + "'";
    return std::nullopt;
}

// ---- JSON mapping --------------------------------------------------------
// Unified JSONL schema: one object per line, optional fields omitted.

inline void to_json(Json& j, const CorpusRecord& rec) {
    j = Json{{"id", rec.id}, {"dataset", rec.dataset}};
    if (rec.topic) j["topic"] = *rec.topic;
    if (rec.stance) j["stance"] = *rec.stance;
    if (!rec.units.empty()) {
        auto& units = j["units"] = Json::array();
        for (const auto& u : rec.units) units.push_back({{"id", u.id}, {"text", u.text}});
    }
    if (!rec.components.empty()) {
        auto& comps = j["components"] = Json::array();
        for (const auto& c : rec.components) {
            Json jc{{"id", c.id}, {"unit", c.unit}, {"label", c.label}};
            if (c.stance) jc["stance"] = *c.stance;
            comps.push_back(std::move(jc));
        }
    }
    if (!rec.relations.empty()) {
        auto& rels = j["relations"] = Json::array();
        for (const auto& r : rec.relations)
            rels.push_back({{"id", r.id}, {"source", r.source}, {"target", r.target}, {"type", r.type}});
    }
    if (!rec.extras.empty()) j["extras"] = rec.extras;
}

inline void from_json(const Json& j, CorpusRecord& rec) {
    rec = CorpusRecord{};
    rec.id = j.at("id").get<std::string>();
    rec.dataset = j.at("dataset").get<std::string>();
    if (j.contains("topic")) rec.topic = j.at("topic").get<std::string>();
    if (j.contains("stance")) rec.stance = j.at("stance").get<std::string>();
    if (j.contains("units"))
        for (const auto& ju : j.at("units"))
            rec.units.push_back({ju.at("id").get<std::string>(), ju.at("text").get<std::string>()});
    if (j.contains("components"))
        for (const auto& jc : j.at("components")) {
            Component c;
            c.id = jc.at("id").get<std::string>();
            c.unit = jc.at("unit").get<std::string>();
            c.label = jc.at("label").get<std::string>();
            if (jc.contains("stance")) c.stance = jc.at("stance").get<std::string>();
            rec.components.push_back(std::move(c));
        }
    if (j.contains("relations"))
        for (const auto& jr : j.at("relations"))
            rec.relations.push_back({jr.at("id").get<std::string>(),
                                     jr.at("source").get<std::string>(),
                                     jr.at("target").get<std::string>(),
                                     jr.at("type").get<std::string>()});
    if (j.contains("extras")) rec.extras = j.at("extras").get<std::map<std::string, std::string>>();
}

inline void to_json(Json& j, const TaskInstance& inst) {
    j = Json{{"task", std::string(task_name(inst.task))},
             {"dataset", inst.dataset},
             {"id", inst.id},
             {"inputs", inst.inputs},
             {"gold", inst.gold}};
}

inline void from_json(const Json& j, TaskInstance& inst) {
    inst = TaskInstance{};
    inst.task = task_from_name(j.at("task").get<std::string>());
    inst.dataset = j.at("dataset").get<std::string>();
    inst.id = j.at("id").get<std::string>();
    inst.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    inst.gold = j.at("gold").get<std::vector<std::string>>();
}

// ---- JSONL I/O -----------------------------------------------------------

template <typename T>
void write_jsonl(const std::vector<T>& items, std::ostream& out) {
    for (const auto& item : items) {
        Json j = item;
        out << j.dump() << "\n";
    }
}

template <typename T>
void write_jsonl_file(const std::vector<T>& items, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    write_jsonl(items, out);
    if (!out) throw Error("write failed: " + path);
}

template <typename T>
std::vector<T> read_jsonl(std::istream& in, const std::string& origin = "<stream>") {
    std::vector<T> items;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error(origin + ":" + std::to_string(line_no) + ": malformed JSON line");
        try {
            items.push_back(j.get<T>());
        } catch (const std::exception& e) {
            throw Error(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return items;
}

template <typename T>
std::vector<T> read_jsonl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    return read_jsonl<T>(in, path);
}

}  // namespace amtk
