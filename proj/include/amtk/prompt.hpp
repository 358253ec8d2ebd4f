#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/rng.hpp"
#include "amtk/sha256.hpp"
#include "amtk/tasks.hpp"

namespace amtk::prompt {

inline constexpr std::string_view kAnswerToken = "<|ANSWER|>";

// A template is an instruction header (task description, label listing, and
// the answer-format line) plus an input block whose lines carry placeholder
// tokens. Zero-shot rendering is header + filled block; few-shot rendering
// inserts completed example blocks (inputs + answer line) before the query
// block.
struct PromptTemplate {
    TaskId task;
    std::string instruction;
    std::string block;

    std::string body() const { return instruction + "\n\n" + block; }
};

namespace detail {

struct TokenBinding {
    std::string token;  // literal placeholder in the block
    std::string key;    // instance input key, or "" for the label-set token
};

inline const std::vector<TokenBinding>& token_bindings() {
    static const std::vector<TokenBinding> bindings = {
        {"<topic>", "topic"},
        {"<sentence>", "sentence"},
        {"<full text>", "full_text"},
        {"<source argument>", "source"},
        {"<argument target>", "target"},
        {"<claim>", "claim"},
        {"<title>", "title"},
        {"<stance>", "stance"},
        {"<definition>", "definition"},
        {"<quality dimension>", "quality_dimension"},
        {"{relation}", ""},
        {"{type}", ""},
        {"{fallacies}", ""},
        {"{quality}", ""},
    };
    return bindings;
}

inline std::string join_catalog(TaskId task) {
    std::string out;
    for (const auto& l : label_catalog(task)) {
        if (!out.empty()) out += ", ";
        out += l;
    }
    return out;
}

}  // namespace detail

inline const PromptTemplate& get_template(TaskId task) {
    static const std::map<TaskId, PromptTemplate> templates = [] {
        std::map<TaskId, PromptTemplate> m;
        auto add = [&m](TaskId t, std::string task_line, std::string format_noun,
                        std::string block) {
            PromptTemplate tpl;
            tpl.task = t;
            tpl.instruction =
                "You are an expert in argumentation. " + std::move(task_line) + "\n" +
                "Your answer must be in the following format with only " +
                std::move(format_noun) + " in the answer section:\n" +
                "<|ANSWER|> <answer> <|ANSWER|>.";
            tpl.block = std::move(block);
            m.emplace(t, std::move(tpl));
        };
        add(TaskId::ACC,
            "Your task is to determine whether the given [SENTENCE] is a Claim or a "
            "Premise. Utilize the [TOPIC] and the [FULL TEXT] as context to support your "
            "decision.",
            "Claim or Premise",
            "[TOPIC]: <topic>\n[SENTENCE]: <sentence>\n[FULL TEXT]: <full text>");
        add(TaskId::CD,
            "Your task is to determine whether the given [SENTENCE] is a Claim or "
            "Non-claim. Utilize the [TOPIC] and the [FULL TEXT] as context to support "
            "your decision.",
            "Claim or Non-claim",
            "[TOPIC]: <topic>\n[SENTENCE]: <sentence>\n[FULL TEXT]: <full text>");
        add(TaskId::ED,
            "Your task is to determine whether the given [SENTENCE] is an Evidence or "
            "Non-evidence. Utilize the [TOPIC] and the [ARGUMENT] as context to support "
            "your decision.",
            "Evidence or Non-evidence",
            "[TOPIC]: <topic>\n[ARGUMENT]: <claim>\n[SENTENCE]: <sentence>");
        add(TaskId::AR,
            "Your task is to determine the type of relation between [SOURCE] and "
            "[TARGET]. The type of relation would be in the [RELATION] set. Utilize the "
            "[TOPIC] as context to support your decision.",
            "the type of the relation",
            "[RELATION]: {relation}\n[TOPIC]: <topic>\n[SOURCE]: <source argument>\n"
            "[TARGET]: <argument target>");
        add(TaskId::ET,
            "Your task is to determine the type of evidence of the given [SENTENCE]. The "
            "type of evidence would be in the [TYPE] set. Utilize the [TOPIC] and the "
            "[CLAIM] as context to support your decision.",
            "the type of evidence",
            "[TYPE]: {type}\n[TOPIC]: <topic>\n[CLAIM]: <claim>\n[SENTENCE]: <sentence>");
        add(TaskId::SD,
            "Your task is to determine whether the given [SENTENCE] is For or Against. "
            "Utilize the [TOPIC] as context to support your decision.",
            "For or Against",
            "[TOPIC]: <topic>\n[SENTENCE]: <sentence>");
        add(TaskId::FD,
            "Your task is to determine the type of fallacy in the given [SENTENCE]. The "
            "fallacy would be in the [FALLACY] Set. Utilize the [TITLE] and the [FULL "
            "TEXT] as context to support your decision.",
            "the fallacy",
            "[FALLACY]: {fallacies}\n[TITLE]: <title>\n[SENTENCE]: <sentence>\n"
            "[FULL TEXT]: <full text>");
        add(TaskId::AQ,
            "Your task is to determine the quality of the [SENTENCE]. The quality would "
            "be in the [QUALITY] set. Utilize the [TOPIC], the [STANCE] and the "
            "[DEFINITION] as context to support your decision.",
            "the quality",
            "[QUALITY]: {quality}\n[TOPIC]: <topic>\n[STANCE]: <stance>\n"
            "[QUALITY DIMENSION]: <quality dimension>\n[DEFINITION]: <definition>\n"
            "[SENTENCE]: <sentence>");
        return m;
    }();
    return templates.at(task);
}

namespace detail {

// Single left-to-right pass: substituted values are never rescanned, so
// inputs containing placeholder-looking text pass through untouched.
inline std::string fill_block(const PromptTemplate& tpl, const TaskInstance& inst) {
    const std::string& block = tpl.block;
    std::string out;
    out.reserve(block.size() + 256);
    size_t pos = 0;
    while (pos < block.size()) {
        size_t best = std::string::npos;
        const TokenBinding* best_binding = nullptr;
        for (const auto& b : token_bindings()) {
            size_t at = block.find(b.token, pos);
            if (at != std::string::npos && (best == std::string::npos || at < best)) {
                best = at;
                best_binding = &b;
            }
        }
        if (best == std::string::npos) {
            out.append(block, pos, std::string::npos);
            break;
        }
        out.append(block, pos, best - pos);
        if (best_binding->key.empty()) {
            out += join_catalog(tpl.task);
        } else {
            auto it = inst.inputs.find(best_binding->key);
            if (it == inst.inputs.end())
                throw Error("render: instance '" + inst.id + "' missing input key '" +
                            best_binding->key + "'");
            out += it->second;
        }
        pos = best + best_binding->token.size();
    }
    return out;
}

}  // namespace detail

enum class Mode { zero_shot, few_shot };

inline Mode mode_from_name(std::string_view name) {
    if (name == "zero" || name == "zero-shot" || name == "zero_shot") return Mode::zero_shot;
    if (name == "few" || name == "few-shot" || name == "few_shot") return Mode::few_shot;
    throw Error("unknown prompt mode: " + std::string(name));
}

struct FewShotBundle {
    TaskId task = TaskId::ACC;
    std::vector<std::pair<TaskInstance, std::string>> examples;  // (instance, answer)
};

// Expected bundle size: one example per label; AQ covers every (dimension,
// label) pair.
inline size_t expected_bundle_size(TaskId task) {
    if (task == TaskId::AQ)
        return quality_dimensions().size() * label_catalog(TaskId::AQ).size();
    return label_catalog(task).size();
}

// One example per label, chosen as the first match in a seeded shuffle of the
// train split. Instances with a singleton gold set are preferred; a
// multi-gold FD instance can stand in for any of its labels.
inline FewShotBundle build_bundle(const std::vector<TaskInstance>& train_instances,
                                  TaskId task, uint64_t seed) {
    std::vector<const TaskInstance*> pool;
    for (const auto& inst : train_instances)
        if (inst.task == task) pool.push_back(&inst);
    std::sort(pool.begin(), pool.end(),
              [](const TaskInstance* a, const TaskInstance* b) { return a->id < b->id; });
    Rng rng(derive_seed(seed, "bundle", task_name(task)));
    shuffle_fisher_yates(pool, rng);

    auto pick = [&](const std::string& label,
                    const std::string& dimension) -> const TaskInstance* {
        const TaskInstance* fallback = nullptr;
        for (const TaskInstance* inst : pool) {
            if (!dimension.empty()) {
                auto it = inst->inputs.find("quality_dimension");
                if (it == inst->inputs.end() || it->second != dimension) continue;
            }
            bool has = std::find(inst->gold.begin(), inst->gold.end(), label) !=
                       inst->gold.end();
            if (!has) continue;
            if (inst->gold.size() == 1) return inst;
            if (!fallback) fallback = inst;
        }
        return fallback;
    };

    FewShotBundle bundle;
    bundle.task = task;
    if (task == TaskId::AQ) {
        for (const auto& dim : quality_dimensions())
            for (const auto& label : label_catalog(task)) {
                const TaskInstance* inst = pick(label, dim.name);
                if (!inst)
                    throw Error("build_bundle: no train instance with label '" + label +
                                "' for dimension '" + dim.name + "'");
                bundle.examples.emplace_back(*inst, label);
            }
    } else {
        for (const auto& label : label_catalog(task)) {
            const TaskInstance* inst = pick(label, "");
            if (!inst)
                throw Error("build_bundle: no train instance with label '" + label + "'");
            bundle.examples.emplace_back(*inst, label);
        }
    }
    return bundle;
}

inline std::string render(const TaskInstance& inst, Mode mode,
                          const std::optional<FewShotBundle>& bundle = std::nullopt) {
    const PromptTemplate& tpl = get_template(inst.task);
    for (const auto& key : required_input_keys(inst.task))
        if (!inst.inputs.count(key))
            throw Error("render: instance '" + inst.id + "' missing input key '" + key + "'");
    std::string out = tpl.instruction;
    out += "\n\n";
    if (mode == Mode::few_shot) {
        if (!bundle) throw Error("render: few-shot mode requires a bundle");
        if (bundle->task != inst.task)
            throw Error("render: bundle task " + std::string(task_name(bundle->task)) +
                        " does not match instance task " + std::string(task_name(inst.task)));
        for (const auto& [example, answer] : bundle->examples) {
            out += detail::fill_block(tpl, example);
            out += "\n";
            out += kAnswerToken;
            out += " " + answer + " ";
            out += kAnswerToken;
            out += "\n\n";
        }
    }
    out += detail::fill_block(tpl, inst);
    return out;
}

// ---- Versioned template assets ---------------------------------------------
// The templates ship as text files with a checksum manifest; drift between
// the shipped assets and the built-in strings is detectable on both sides.

inline std::string template_sha256(TaskId task) { return sha256_hex(get_template(task).body()); }

inline void write_assets(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Json manifest;
    manifest["version"] = 1;
    for (TaskId t : kAllTasks) {
        std::string name = std::string(task_name(t)) + ".txt";
        std::string body = get_template(t).body();
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error("cannot write template asset: " + name);
        out << body;
        manifest["templates"][std::string(task_name(t))] = {
            {"file", name}, {"sha256", sha256_hex(body)}};
    }
    std::ofstream mout(fs::path(dir) / "manifest.json", std::ios::binary);
    mout << manifest.dump(2) << "\n";
}

// Throws if any asset is missing, differs from its manifest checksum, or
// differs from the built-in template.
inline void verify_assets(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream min(fs::path(dir) / "manifest.json");
    if (!min) throw Error("template manifest not found in " + dir);
    Json manifest = Json::parse(min);
    for (TaskId t : kAllTasks) {
        std::string key(task_name(t));
        if (!manifest.at("templates").contains(key))
            throw Error("template manifest missing entry for " + key);
        const auto& entry = manifest.at("templates").at(key);
        std::ifstream in(fs::path(dir) / entry.at("file").get<std::string>(),
                         std::ios::binary);
        if (!in) throw Error("template asset missing: " + key);
        std::ostringstream ss;
        ss << in.rdbuf();
        std::string disk = ss.str();
        if (sha256_hex(disk) != entry.at("sha256").get<std::string>())
            throw Error("template asset drifted from manifest: " + key);
        if (disk != get_template(t).body())
            throw Error("template asset drifted from built-in template: " + key);
    }
}

}  // namespace amtk::prompt
