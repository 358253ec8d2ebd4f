#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/tasks.hpp"

namespace amtk::parser {

struct ExtractedSpan {
    std::string span;
    bool fallback = false;  // true when fewer than two delimiters were found
};

// Text strictly between the first pair of <|ANSWER|> delimiters, trimmed.
// Generations without two delimiters fall back to the whole string.
inline ExtractedSpan extract(const std::string& raw) {
    static const std::string token = "<|ANSWER|>";
    size_t first = raw.find(token);
    if (first != std::string::npos) {
        size_t begin = first + token.size();
        size_t second = raw.find(token, begin);
        if (second != std::string::npos)
            return {trim(std::string_view(raw).substr(begin, second - begin)), false};
    }
    return {trim(raw), true};
}

enum class ParseStatus { ok, unparsable };

struct ParsedAnswer {
    ParseStatus status = ParseStatus::unparsable;
    std::optional<std::string> label;
    std::string raw_span;
    bool fallback = false;
};

namespace detail {

// canonical_key(alias) -> catalog label. Every catalog label maps to itself;
// a few surface variants seen in model output are added per task.
inline const std::map<std::string, std::string>& alias_map(TaskId task) {
    static const std::map<TaskId, std::map<std::string, std::string>> maps = [] {
        std::map<TaskId, std::map<std::string, std::string>> all;
        for (TaskId t : kAllTasks) {
            auto& m = all[t];
            for (const auto& label : label_catalog(t)) m[canonical_key(label)] = label;
        }
        auto alias = [&all](TaskId t, const char* surface, const char* label) {
            all[t][canonical_key(surface)] = label;
        };
        alias(TaskId::ACC, "Premises", "Premise");
        alias(TaskId::ACC, "Claims", "Claim");
        alias(TaskId::CD, "Nonclaim", "Non-claim");
        alias(TaskId::CD, "Not a claim", "Non-claim");
        alias(TaskId::ED, "Nonevidence", "Non-evidence");
        alias(TaskId::ED, "Not evidence", "Non-evidence");
        alias(TaskId::AR, "norelation", "no relation");
        alias(TaskId::AR, "neutral", "no relation");
        alias(TaskId::AR, "attacks", "attack");
        alias(TaskId::AR, "supports", "support");
        alias(TaskId::SD, "in favor", "For");
        alias(TaskId::SD, "pro", "For");
        alias(TaskId::SD, "con", "Against");
        alias(TaskId::FD, "no fallacy", "none");
        alias(TaskId::FD, "false dillema", "false dilemma");  // the common misspelling
        alias(TaskId::AQ, "Medium", "Average");
        return all;
    }();
    return maps.at(task);
}

}  // namespace detail

// Asserts the alias tables are injective into each catalog: no canonical key
// may be reachable from two different labels.
inline void validate_alias_tables() {
    for (TaskId t : kAllTasks) {
        const auto& catalog = label_catalog(t);
        std::set<std::string> keys;
        for (const auto& label : catalog)
            if (!keys.insert(canonical_key(label)).second)
                throw Error("alias collision inside catalog of " + std::string(task_name(t)));
        for (const auto& [key, label] : detail::alias_map(t)) {
            bool in_catalog = false;
            for (const auto& l : catalog)
                if (l == label) { in_catalog = true; break; }
            if (!in_catalog)
                throw Error("alias '" + key + "' targets unknown label '" + label + "'");
        }
    }
}

// Case-insensitive, punctuation-stripped exact match against the task's
// alias table. Anything else is unparsable.
inline ParsedAnswer normalize(const ExtractedSpan& span, TaskId task) {
    ParsedAnswer out;
    out.raw_span = span.span;
    out.fallback = span.fallback;
    const auto& aliases = detail::alias_map(task);
    auto it = aliases.find(canonical_key(span.span));
    if (it != aliases.end()) {
        out.status = ParseStatus::ok;
        out.label = it->second;
    }
    return out;
}

inline ParsedAnswer parse(const std::string& raw, TaskId task) {
    return normalize(extract(raw), task);
}

// Predictions JSONL row.
struct Prediction {
    std::string id;
    TaskId task = TaskId::ACC;
    ParseStatus status = ParseStatus::unparsable;
    std::optional<std::string> label;
    std::string raw_span;
    bool fallback = false;
};

inline void to_json(Json& j, const Prediction& p) {
    j = Json{{"id", p.id},
             {"task", std::string(task_name(p.task))},
             {"status", p.status == ParseStatus::ok ? "ok" : "unparsable"},
             {"raw_span", p.raw_span},
             {"fallback", p.fallback}};
    if (p.label) j["label"] = *p.label;
}

inline void from_json(const Json& j, Prediction& p) {
    p.id = j.at("id").get<std::string>();
    p.task = task_from_name(j.at("task").get<std::string>());
    p.status = j.at("status").get<std::string>() == "ok" ? ParseStatus::ok
                                                         : ParseStatus::unparsable;
    if (j.contains("label")) p.label = j.at("label").get<std::string>();
    p.raw_span = j.at("raw_span").get<std::string>();
    p.fallback = j.at("fallback").get<bool>();
}

}  // namespace amtk::parser
