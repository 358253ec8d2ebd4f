#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/tasks.hpp"

namespace amtk::extraction {

// Raw relation type -> {attack, support, no relation, attack-on-relation}.
// Shipped as a config file (config/relation_map.json); these built-ins match
// it and cover the Microtext edge vocabulary.
using RelationMap = std::map<std::string, std::string>;

inline RelationMap default_relation_map() {
    return {{"reb", "attack"},   {"sup", "support"}, {"add", "support"},
            {"exa", "support"},  {"und", "attack-on-relation"},
            {"attack", "attack"}, {"support", "support"},
            {"attacks", "attack"}, {"supports", "support"}};
}

struct ExtractLogEntry {
    std::string record_id;
    std::string reason;
};

struct ExtractResult {
    std::vector<TaskInstance> instances;
    std::vector<ExtractLogEntry> skipped;
};

namespace detail {

// Dataset-native component labels and stances onto the canonical catalogs.
inline std::optional<std::string> map_component_label(TaskId task, const std::string& raw) {
    std::string key = canonical_key(raw);
    if (key.empty()) return std::nullopt;
    switch (task) {
        case TaskId::ACC:
            if (key == "claim" || key == "claims" || key == "major claim" ||
                key == "majorclaim")
                return "Claim";
            if (key == "premise" || key == "premises") return "Premise";
            return std::nullopt;
        case TaskId::CD:
            if (key == "claim" || key == "claims") return "Claim";
            if (key == "non claim" || key == "nonclaim" || key == "no claim" ||
                key == "o" || key == "none")
                return "Non-claim";
            return std::nullopt;
        case TaskId::ED:
            if (key == "evidence") return "Evidence";
            if (key == "non evidence" || key == "nonevidence" || key == "no evidence" ||
                key == "none")
                return "Non-evidence";
            return std::nullopt;
        case TaskId::ET:
            for (const auto& l : label_catalog(TaskId::ET))
                if (canonical_key(l) == key) return l;
            return std::nullopt;
        case TaskId::FD:
            if (key == "nothing" || key == "no fallacy") return "none";
            for (const auto& l : label_catalog(TaskId::FD))
                if (canonical_key(l) == key) return l;
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

inline std::optional<std::string> map_stance(const std::string& raw) {
    std::string key = canonical_key(raw);
    if (key == "for" || key == "pro" || key == "support" || key == "supports" ||
        key == "favor" || key == "in favor" || key == "agree" || key == "positive" ||
        key == "1")
        return "For";
    if (key == "against" || key == "opp" || key == "con" || key == "oppose" ||
        key == "opposes" || key == "attack" || key == "disagree" || key == "negative" ||
        key == "0" || key == "minus 1")
        return "Against";
    return std::nullopt;
}

inline std::optional<std::string> map_quality(const std::string& raw) {
    std::string key = canonical_key(raw);
    if (key == "low" || key == "1" || key == "1 low") return "Low";
    if (key == "average" || key == "2" || key == "2 average" || key == "medium")
        return "Average";
    if (key == "high" || key == "3" || key == "3 high" || key == "good") return "High";
    return std::nullopt;
}

inline std::string unit_text(const CorpusRecord& rec, const std::string& unit_id) {
    for (const auto& u : rec.units)
        if (u.id == unit_id) return u.text;
    return {};
}

inline std::string full_text_of(const CorpusRecord& rec) {
    auto it = rec.extras.find("full_text");
    if (it != rec.extras.end()) return it->second;
    std::string joined;
    for (const auto& u : rec.units) {
        if (!joined.empty()) joined.push_back(' ');
        joined += u.text;
    }
    return joined;
}

inline std::string extra_or(const CorpusRecord& rec, const std::string& key,
                            const std::string& fallback) {
    auto it = rec.extras.find(key);
    return it != rec.extras.end() ? it->second : fallback;
}

// Follow a relation target through chained relations down to a component.
// Undercuts (attacks on relations) resolve to the attacked relation's source.
inline std::optional<std::string> resolve_to_component(const CorpusRecord& rec,
                                                       const std::string& target_id,
                                                       int depth = 0) {
    if (depth > 16) return std::nullopt;  // cycle guard
    for (const auto& c : rec.components)
        if (c.id == target_id) return c.id;
    for (const auto& r : rec.relations)
        if (r.id == target_id) return resolve_to_component(rec, r.source, depth + 1);
    return std::nullopt;
}

}  // namespace detail

// Extracts classification instances for `task` from records of the datasets
// mapped to it. Records missing task-required material are skipped with a log
// entry, never silently.
inline ExtractResult extract(const std::vector<CorpusRecord>& records, TaskId task,
                             const RelationMap& relation_map = default_relation_map()) {
    ExtractResult out;
    for (const auto& rec : records) {
        if (!dataset_feeds_task(rec.dataset, task)) continue;

        auto skip = [&](const std::string& why) { out.skipped.push_back({rec.id, why}); };
        std::string topic = rec.topic.value_or("");
        auto push = [&](TaskInstance&& inst) {
            if (auto why = validate_instance(inst))
                skip(inst.id + ": " + *why);
            else
                out.instances.push_back(std::move(inst));
        };

        switch (task) {
            case TaskId::ACC:
            case TaskId::CD:
            case TaskId::ED:
            case TaskId::ET: {
                if (rec.components.empty()) { skip("no components"); break; }
                if (topic.empty() && task != TaskId::ET) { skip("no topic"); break; }
                bool any = false;
                for (const auto& comp : rec.components) {
                    auto label = detail::map_component_label(task, comp.label);
                    if (!label) continue;
                    any = true;
                    TaskInstance inst;
                    inst.task = task;
                    inst.dataset = rec.dataset;
                    inst.id = rec.id + "/" + comp.id;
                    inst.inputs["topic"] = topic;
                    inst.inputs["sentence"] = detail::unit_text(rec, comp.unit);
                    if (task == TaskId::ACC || task == TaskId::CD)
                        inst.inputs["full_text"] = detail::full_text_of(rec);
                    if (task == TaskId::ED || task == TaskId::ET)
                        inst.inputs["claim"] = detail::extra_or(rec, "claim", "");
                    inst.gold = {*label};
                    push(std::move(inst));
                }
                if (!any) skip("no component label usable for task");
                break;
            }
            case TaskId::SD: {
                bool any = false;
                for (const auto& comp : rec.components) {
                    std::string raw = comp.stance ? *comp.stance : rec.stance.value_or("");
                    if (raw.empty()) continue;
                    auto stance = detail::map_stance(raw);
                    if (!stance) continue;
                    any = true;
                    TaskInstance inst;
                    inst.task = task;
                    inst.dataset = rec.dataset;
                    inst.id = rec.id + "/" + comp.id;
                    inst.inputs["topic"] = topic;
                    inst.inputs["sentence"] = detail::unit_text(rec, comp.unit);
                    inst.gold = {*stance};
                    push(std::move(inst));
                }
                if (!any) skip("no stance-bearing component");
                break;
            }
            case TaskId::FD: {
                if (rec.components.empty()) { skip("no components"); break; }
                // Group fallacy labels per unit; MAFALDA-style records may
                // carry several per sentence.
                std::map<std::string, std::set<std::string>> per_unit;
                for (const auto& comp : rec.components)
                    if (auto label = detail::map_component_label(task, comp.label))
                        per_unit[comp.unit].insert(*label);
                if (per_unit.empty()) { skip("no fallacy labels"); break; }
                for (const auto& u : rec.units) {
                    auto it = per_unit.find(u.id);
                    if (it == per_unit.end()) continue;
                    TaskInstance inst;
                    inst.task = task;
                    inst.dataset = rec.dataset;
                    inst.id = rec.id + "/" + u.id;
                    inst.inputs["title"] = detail::extra_or(rec, "title", "");
                    inst.inputs["sentence"] = u.text;
                    inst.inputs["full_text"] = detail::full_text_of(rec);
                    inst.gold.assign(it->second.begin(), it->second.end());
                    push(std::move(inst));
                }
                break;
            }
            case TaskId::AR: {
                if (rec.relations.empty() && rec.components.size() < 2) {
                    skip("no relations and fewer than two components");
                    break;
                }
                struct Pair { std::string src, trg, gold, rel_id; };
                std::vector<Pair> linked;
                std::set<std::pair<std::string, std::string>> linked_pairs;
                for (const auto& rel : rec.relations) {
                    auto mapped_it = relation_map.find(rel.type);
                    if (mapped_it == relation_map.end()) {
                        skip("relation '" + rel.id + "' has unmapped type '" + rel.type + "'");
                        continue;
                    }
                    std::string gold = mapped_it->second == "attack-on-relation"
                                           ? "attack"
                                           : mapped_it->second;
                    if (gold != "attack" && gold != "support") continue;
                    auto src = detail::resolve_to_component(rec, rel.source);
                    auto trg = detail::resolve_to_component(rec, rel.target);
                    if (!src || !trg || *src == *trg) {
                        skip("relation '" + rel.id + "' does not resolve to a component pair");
                        continue;
                    }
                    linked.push_back({*src, *trg, gold, rel.id});
                    linked_pairs.insert({*src, *trg});
                    linked_pairs.insert({*trg, *src});
                }
                auto make_instance = [&](const std::string& src, const std::string& trg,
                                         const std::string& gold, const std::string& suffix) {
                    TaskInstance inst;
                    inst.task = task;
                    inst.dataset = rec.dataset;
                    inst.id = rec.id + "/" + suffix;
                    inst.inputs["topic"] = topic;
                    std::string src_unit, trg_unit;
                    for (const auto& c : rec.components) {
                        if (c.id == src) src_unit = c.unit;
                        if (c.id == trg) trg_unit = c.unit;
                    }
                    inst.inputs["source"] = detail::unit_text(rec, src_unit);
                    inst.inputs["target"] = detail::unit_text(rec, trg_unit);
                    inst.gold = {gold};
                    push(std::move(inst));
                };
                size_t n_attack = 0, n_support = 0;
                for (const auto& p : linked) {
                    (p.gold == "attack" ? n_attack : n_support) += 1;
                    make_instance(p.src, p.trg, p.gold, p.rel_id);
                }
                // "no relation" negatives: unlinked component pairs from the
                // same record, count balanced against the linked classes,
                // chosen in a deterministic hash order.
                size_t quota = (n_attack + n_support + 1) / 2;
                if (quota > 0) {
                    struct Candidate { uint64_t rank; std::string src, trg; };
                    std::vector<Candidate> candidates;
                    for (size_t i = 0; i < rec.components.size(); ++i)
                        for (size_t j = i + 1; j < rec.components.size(); ++j) {
                            const auto& a = rec.components[i].id;
                            const auto& b = rec.components[j].id;
                            if (linked_pairs.count({a, b})) continue;
                            candidates.push_back(
                                {fnv1a64(rec.id + "|" + a + "|" + b), a, b});
                        }
                    std::sort(candidates.begin(), candidates.end(),
                              [](const Candidate& x, const Candidate& y) {
                                  return x.rank != y.rank ? x.rank < y.rank
                                                          : x.src + x.trg < y.src + y.trg;
                              });
                    if (candidates.size() > quota) candidates.resize(quota);
                    int neg_no = 0;
                    for (const auto& c : candidates)
                        make_instance(c.src, c.trg, "no relation",
                                      "nr" + std::to_string(++neg_no));
                }
                break;
            }
            case TaskId::AQ: {
                if (rec.units.empty()) { skip("no argument text"); break; }
                std::string sentence = rec.units.front().text;
                std::string stance = rec.stance.value_or("");
                bool any = false;
                // One instance per rated quality dimension.
                for (const auto& dim : quality_dimensions()) {
                    auto it = rec.extras.find("quality:" + dim.name);
                    if (it == rec.extras.end()) continue;
                    auto rating = detail::map_quality(it->second);
                    if (!rating) {
                        skip("unmappable quality rating '" + it->second + "' for " + dim.name);
                        continue;
                    }
                    any = true;
                    TaskInstance inst;
                    inst.task = task;
                    inst.dataset = rec.dataset;
                    inst.id = rec.id + "/" + canonical_key(dim.name);
                    inst.inputs["topic"] = topic;
                    inst.inputs["stance"] = stance;
                    inst.inputs["sentence"] = sentence;
                    inst.inputs["quality_dimension"] = dim.name;
                    inst.inputs["definition"] = dim.definition;
                    inst.gold = {*rating};
                    push(std::move(inst));
                }
                if (!any) skip("no quality ratings");
                break;
            }
        }
    }
    return out;
}

}  // namespace amtk::extraction
