#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amtk/util.hpp"

namespace amtk {

// The eight classification tasks. Order is fixed and used wherever a
// deterministic task iteration order is required.
enum class TaskId { ACC, CD, ED, AR, ET, SD, FD, AQ };

inline constexpr std::array<TaskId, 8> kAllTasks = {
    TaskId::ACC, TaskId::CD, TaskId::ED, TaskId::AR,
    TaskId::ET,  TaskId::SD, TaskId::FD, TaskId::AQ};

inline std::string_view task_name(TaskId t) {
    switch (t) {
        case TaskId::ACC: return "ACC";
        case TaskId::CD:  return "CD";
        case TaskId::ED:  return "ED";
        case TaskId::AR:  return "AR";
        case TaskId::ET:  return "ET";
        case TaskId::SD:  return "SD";
        case TaskId::FD:  return "FD";
        case TaskId::AQ:  return "AQ";
    }
    throw Error("task_name: invalid TaskId");
}

inline TaskId task_from_name(std::string_view name) {
    for (TaskId t : kAllTasks)
        if (task_name(t) == name) return t;
    throw Error("unknown task id: " + std::string(name));
}

// Canonical label set per task, in catalog order. Catalog order is the order
// labels are listed in prompts and used for tie-breaking.
inline const std::vector<std::string>& label_catalog(TaskId t) {
    static const std::vector<std::string> acc = {"Claim", "Premise"};
    static const std::vector<std::string> cd = {"Claim", "Non-claim"};
    static const std::vector<std::string> ed = {"Evidence", "Non-evidence"};
    static const std::vector<std::string> ar = {"attack", "support", "no relation"};
    static const std::vector<std::string> et = {"NONE", "ANECDOTAL", "EXPERT", "EXPLANATION", "STUDY"};
    static const std::vector<std::string> sd = {"For", "Against"};
    static const std::vector<std::string> fd = {
        "none", "appeal to fear", "hasty generalization", "appeal to worse problem",
        "appeal to authority", "false causality", "appeal to tradition", "ad populum",
        "guilt by association", "causal oversimplification", "false dilemma",
        "appeal to ridicule", "false analogy", "slippery slope", "appeal to majority",
        "appeal to nature", "straw man", "circular reasoning", "equivocation", "ad hominem"};
    static const std::vector<std::string> aq = {"Low", "Average", "High"};
    switch (t) {
        case TaskId::ACC: return acc;
        case TaskId::CD:  return cd;
        case TaskId::ED:  return ed;
        case TaskId::AR:  return ar;
        case TaskId::ET:  return et;
        case TaskId::SD:  return sd;
        case TaskId::FD:  return fd;
        case TaskId::AQ:  return aq;
    }
    throw Error("label_catalog: invalid TaskId");
}

// Input keys an instance of the task must carry.
inline const std::vector<std::string>& required_input_keys(TaskId t) {
    static const std::vector<std::string> acc = {"topic", "sentence", "full_text"};
    static const std::vector<std::string> cd = {"topic", "sentence", "full_text"};
    static const std::vector<std::string> ed = {"topic", "claim", "sentence"};
    static const std::vector<std::string> ar = {"topic", "source", "target"};
    static const std::vector<std::string> et = {"topic", "claim", "sentence"};
    static const std::vector<std::string> sd = {"topic", "sentence"};
    static const std::vector<std::string> fd = {"title", "sentence", "full_text"};
    static const std::vector<std::string> aq = {"topic", "stance", "sentence",
                                                "quality_dimension", "definition"};
    switch (t) {
        case TaskId::ACC: return acc;
        case TaskId::CD:  return cd;
        case TaskId::ED:  return ed;
        case TaskId::AR:  return ar;
        case TaskId::ET:  return et;
        case TaskId::SD:  return sd;
        case TaskId::FD:  return fd;
        case TaskId::AQ:  return aq;
    }
    throw Error("required_input_keys: invalid TaskId");
}

// The 19 registered source datasets.
inline const std::vector<std::string>& dataset_registry() {
    static const std::vector<std::string> ids = {
        "abstrct", "aqm", "argsum", "cocolofa", "comarg",
        "dagstuhl_argquality", "fever", "iam", "ibm_argument", "ibm_claim",
        "ibm_claim_polarity", "ibm_evidence", "ibm_type", "mafalda",
        "microtext_p1", "microtext_p2", "nixon_kennedy", "node",
        "persuasive_essays"};
    return ids;
}

inline bool dataset_registered(std::string_view id) {
    for (const auto& d : dataset_registry())
        if (d == id) return true;
    return false;
}

// Which datasets feed which task.
inline const std::vector<std::string>& task_datasets(TaskId t) {
    static const std::vector<std::string> acc = {"microtext_p1", "microtext_p2",
                                                 "persuasive_essays", "abstrct"};
    static const std::vector<std::string> cd = {"iam", "ibm_claim", "ibm_argument"};
    static const std::vector<std::string> ed = {"argsum", "iam", "ibm_evidence"};
    static const std::vector<std::string> ar = {"microtext_p1", "microtext_p2",
                                                "persuasive_essays", "abstrct",
                                                "nixon_kennedy", "node",
                                                "ibm_claim_polarity", "comarg"};
    static const std::vector<std::string> et = {"argsum", "ibm_type", "aqm"};
    static const std::vector<std::string> sd = {"ibm_claim_polarity", "comarg", "iam",
                                                "fever", "aqm"};
    static const std::vector<std::string> fd = {"cocolofa", "mafalda"};
    static const std::vector<std::string> aq = {"dagstuhl_argquality"};
    switch (t) {
        case TaskId::ACC: return acc;
        case TaskId::CD:  return cd;
        case TaskId::ED:  return ed;
        case TaskId::AR:  return ar;
        case TaskId::ET:  return et;
        case TaskId::SD:  return sd;
        case TaskId::FD:  return fd;
        case TaskId::AQ:  return aq;
    }
    throw Error("task_datasets: invalid TaskId");
}

inline bool dataset_feeds_task(std::string_view dataset, TaskId t) {
    for (const auto& d : task_datasets(t))
        if (d == dataset) return true;
    return false;
}

struct QualityDimension {
    std::string name;
    std::string definition;
};

// The 15 rated quality dimensions with one-line rubric definitions.
inline const std::vector<QualityDimension>& quality_dimensions() {
    static const std::vector<QualityDimension> dims = {
        {"overall quality",
         "Overall assessment of how good the argumentation is across all dimensions"},
        {"local acceptability",
         "A premise is locally acceptable if it is rationally worthy of being believed to be true"},
        {"appropriateness",
         "Argumentation has an appropriate style if the used language supports the creation of "
         "credibility and emotions as well as if it is proportional to the issue"},
        {"arrangement",
         "Argumentation is arranged properly if it presents the issue, the arguments, and its "
         "conclusion in the right order"},
        {"clarity",
         "Argumentation has a clear style if it uses correct and widely unambiguous language as "
         "well as if it avoids unnecessary complexity and deviation from the issue"},
        {"cogency",
         "An argument is cogent if it has acceptable premises that are relevant to its conclusion "
         "and that are sufficient to draw the conclusion"},
        {"effectiveness",
         "Argumentation is effective if it persuades the target audience of the author's stance "
         "on the issue"},
        {"global acceptability",
         "Argumentation is globally acceptable if everything it conveys is rationally worthy of "
         "being believed by the target audience"},
        {"global relevance",
         "Argumentation is globally relevant if it contributes to the resolution of the issue"},
        {"global sufficiency",
         "Argumentation is globally sufficient if it adequately rebuts the counter-arguments that "
         "can be raised against it"},
        {"reasonableness",
         "Argumentation is reasonable if it contributes to the resolution of the issue in a "
         "sufficient way that is acceptable to the target audience"},
        {"local relevance",
         "A premise is locally relevant if it contributes to the acceptance or rejection of the "
         "argument's conclusion"},
        {"credibility",
         "Argumentation creates credibility if it conveys arguments in a way that makes the "
         "author worthy of belief"},
        {"emotional appeal",
         "Argumentation makes a successful emotional appeal if it creates emotions in a way that "
         "makes the target audience more open to the arguments"},
        {"sufficiency",
         "An argument's premises are sufficient if, together, they provide enough support to make "
         "it rational to draw its conclusion"}};
    return dims;
}

inline std::optional<std::string> quality_definition(std::string_view name) {
    std::string key = canonical_key(name);
    for (const auto& d : quality_dimensions())
        if (canonical_key(d.name) == key) return d.definition;
    return std::nullopt;
}

}  // namespace amtk
