#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/parser.hpp"
#include "amtk/tasks.hpp"

namespace amtk::metrics {

// Unparsable generations are scored as predictions of this reserved
// non-label: they enter the precision denominator and can never be true
// positives.
inline constexpr std::string_view kUnparsableLabel = "<unparsable>";

struct LabelCounts {
    long long tp = 0, fp = 0, fn = 0;
};

struct ConfusionTable {
    TaskId task = TaskId::ACC;
    std::map<std::string, LabelCounts> counts;
    long long n_instances = 0;
    long long n_unparsable = 0;

    long long tp_sum() const { return sum(&LabelCounts::tp); }
    long long fp_sum() const { return sum(&LabelCounts::fp); }
    long long fn_sum() const { return sum(&LabelCounts::fn); }

    // Partial tables merge associatively; counts are additive.
    ConfusionTable& operator+=(const ConfusionTable& other) {
        if (other.task != task && other.n_instances > 0 && n_instances > 0)
            throw Error("merging confusion tables of different tasks");
        if (n_instances == 0) task = other.task;
        for (const auto& [label, c] : other.counts) {
            counts[label].tp += c.tp;
            counts[label].fp += c.fp;
            counts[label].fn += c.fn;
        }
        n_instances += other.n_instances;
        n_unparsable += other.n_unparsable;
        return *this;
    }

private:
    long long sum(long long LabelCounts::* member) const {
        long long s = 0;
        for (const auto& [_, c] : counts) s += c.*member;
        return s;
    }
};

// 2PR/(P+R), with the degenerate cases pinned: P+R = 0 yields 0 and P = R
// yields P exactly (the harmonic mean of equal values).
inline double f1_score(double p, double r) {
    if (p == r) return p;
    if (p + r <= 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

struct Scores {
    double precision = 0, recall = 0, f1 = 0;
};

inline Scores micro_scores(const ConfusionTable& t) {
    long long tp = t.tp_sum(), fp = t.fp_sum(), fn = t.fn_sum();
    Scores s;
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = f1_score(s.precision, s.recall);
    return s;
}

// Macro over the task's catalog labels; the reserved non-label is excluded.
inline Scores macro_scores(const ConfusionTable& t) {
    Scores acc;
    const auto& catalog = label_catalog(t.task);
    for (const auto& label : catalog) {
        LabelCounts c;
        auto it = t.counts.find(label);
        if (it != t.counts.end()) c = it->second;
        double p = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
        double r = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
        acc.precision += p;
        acc.recall += r;
        acc.f1 += f1_score(p, r);
    }
    auto n = static_cast<double>(catalog.size());
    return {acc.precision / n, acc.recall / n, acc.f1 / n};
}

struct GoldInstance {
    std::string id;
    std::string label;
};

// Single-label scoring. Predictions and golds are matched by id; an id
// mismatch is an error, not a silent drop.
inline ConfusionTable score_single(const std::vector<parser::Prediction>& preds,
                                   const std::vector<GoldInstance>& golds, TaskId task) {
    if (preds.size() != golds.size())
        throw Error("score_single: " + std::to_string(preds.size()) + " predictions vs " +
                    std::to_string(golds.size()) + " golds");
    std::map<std::string, const GoldInstance*> by_id;
    for (const auto& g : golds) by_id[g.id] = &g;
    ConfusionTable table;
    table.task = task;
    for (const auto& p : preds) {
        auto it = by_id.find(p.id);
        if (it == by_id.end())
            throw Error("score_single: prediction id '" + p.id + "' has no gold");
        const std::string& gold = it->second->label;
        table.n_instances += 1;
        if (p.status == parser::ParseStatus::ok && p.label) {
            if (*p.label == gold) {
                table.counts[gold].tp += 1;
            } else {
                table.counts[*p.label].fp += 1;
                table.counts[gold].fn += 1;
            }
        } else {
            table.n_unparsable += 1;
            table.counts[std::string(kUnparsableLabel)].fp += 1;
            table.counts[gold].fn += 1;
        }
    }
    return table;
}

// ---- FD multi-label --------------------------------------------------------

struct MultiPrediction {
    std::string id;
    std::vector<std::string> predictions;  // parsed labels from k completions
    std::vector<std::string> gold;
};

// Per instance: precision is the fraction of (deduplicated) predictions that
// land in the gold set, recall the fraction of gold labels hit. Corpus
// scores average over instances; F1 is the harmonic mean of the averages.
inline Scores score_fd_multi(const std::vector<MultiPrediction>& instances) {
    double p_sum = 0, r_sum = 0;
    for (const auto& inst : instances) {
        if (inst.gold.empty())
            throw Error("score_fd_multi: instance '" + inst.id + "' has no gold labels");
        std::set<std::string> preds(inst.predictions.begin(), inst.predictions.end());
        std::set<std::string> gold(inst.gold.begin(), inst.gold.end());
        if (preds.empty()) continue;  // contributes (0, 0)
        long long hits = 0;
        for (const auto& p : preds)
            if (gold.count(p)) ++hits;
        p_sum += static_cast<double>(hits) / static_cast<double>(preds.size());
        r_sum += static_cast<double>(hits) / static_cast<double>(gold.size());
    }
    if (instances.empty()) return {};
    auto n = static_cast<double>(instances.size());
    Scores s;
    s.precision = p_sum / n;
    s.recall = r_sum / n;
    s.f1 = f1_score(s.precision, s.recall);
    return s;
}

// ---- Report ----------------------------------------------------------------

struct TaskReport {
    Scores micro;
    Scores macro;
    long long n = 0;
    long long unparsable = 0;
    std::optional<Scores> fd_multi;  // FD only, when sampled completions exist
};

struct EvalReport {
    std::map<std::string, TaskReport> tasks;  // keyed by task name
    std::map<std::string, std::string> metadata;
};

inline TaskReport report_for(const ConfusionTable& table) {
    TaskReport r;
    r.micro = micro_scores(table);
    r.macro = macro_scores(table);
    r.n = table.n_instances;
    r.unparsable = table.n_unparsable;
    return r;
}

inline void to_json(Json& j, const EvalReport& report) {
    j = Json::object();
    auto& tasks = j["tasks"] = Json::object();
    for (const auto& [name, r] : report.tasks) {
        Json jr{{"precision", r.micro.precision},
                {"recall", r.micro.recall},
                {"f1", r.micro.f1},
                {"macro_precision", r.macro.precision},
                {"macro_recall", r.macro.recall},
                {"macro_f1", r.macro.f1},
                {"n", r.n},
                {"unparsable", r.unparsable}};
        if (r.fd_multi)
            jr["fd_multi"] = {{"precision", r.fd_multi->precision},
                              {"recall", r.fd_multi->recall},
                              {"f1", r.fd_multi->f1}};
        tasks[name] = std::move(jr);
    }
    j["metadata"] = report.metadata;
}

// Text table: one column per task, F1/P/R rows.
inline std::string render_text_table(const EvalReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << std::setw(10) << std::left << "metric";
    for (const auto& [name, _] : report.tasks) out << std::setw(12) << std::right << name;
    out << "\n";
    auto row = [&](const char* label, auto getter) {
        out << std::setw(10) << std::left << label;
        for (const auto& [_, r] : report.tasks) out << std::setw(12) << std::right << getter(r);
        out << "\n";
    };
    row("f1", [](const TaskReport& r) { return r.micro.f1; });
    row("precision", [](const TaskReport& r) { return r.micro.precision; });
    row("recall", [](const TaskReport& r) { return r.micro.recall; });
    row("macro_f1", [](const TaskReport& r) { return r.macro.f1; });
    out << std::setw(10) << std::left << "n";
    for (const auto& [_, r] : report.tasks) out << std::setw(12) << std::right << r.n;
    out << "\n";
    out << std::setw(10) << std::left << "unparsable";
    for (const auto& [_, r] : report.tasks) out << std::setw(12) << std::right << r.unparsable;
    out << "\n";
    return out.str();
}

}  // namespace amtk::metrics
