#pragma once

#include <map>
#include <string>
#include <vector>

#include "amtk/client.hpp"
#include "amtk/metrics.hpp"
#include "amtk/parser.hpp"

namespace amtk::scoring {

struct ScoreRun {
    metrics::EvalReport report;
    std::vector<parser::Prediction> predictions;  // first-sample parse per instance
};

// Parses generations against gold instances and scores every task present.
// Single-label scoring covers instances with one gold label (all tasks); FD
// additionally gets the multi-prediction scores over all of its instances,
// using every sampled completion. A generation recorded as a terminal error
// counts as an unparsable prediction; a missing record is a bookkeeping error.
inline ScoreRun score_run(const std::vector<TaskInstance>& instances,
                          const std::vector<client::GenerationRecord>& generations,
                          std::map<std::string, std::string> metadata = {}) {
    std::map<std::string, const client::GenerationRecord*> by_id;
    for (const auto& g : generations) by_id[g.id] = &g;

    ScoreRun out;
    std::map<TaskId, std::vector<parser::Prediction>> preds_by_task;
    std::map<TaskId, std::vector<metrics::GoldInstance>> golds_by_task;
    std::vector<metrics::MultiPrediction> fd_multi;

    for (const auto& inst : instances) {
        auto it = by_id.find(inst.id);
        if (it == by_id.end())
            throw Error("score_run: no generation recorded for instance '" + inst.id + "'");
        const client::GenerationRecord& gen = *it->second;

        parser::Prediction pred;
        pred.id = inst.id;
        pred.task = inst.task;
        parser::ParsedAnswer parsed = parser::parse(gen.ok ? gen.raw_text : "", inst.task);
        pred.status = parsed.status;
        pred.label = parsed.label;
        pred.raw_span = parsed.raw_span;
        pred.fallback = parsed.fallback;
        out.predictions.push_back(pred);

        if (inst.gold.size() == 1) {
            preds_by_task[inst.task].push_back(pred);
            golds_by_task[inst.task].push_back({inst.id, inst.gold.front()});
        }
        if (inst.task == TaskId::FD) {
            metrics::MultiPrediction mp;
            mp.id = inst.id;
            mp.gold = inst.gold;
            const auto& samples = gen.samples.empty() && gen.ok
                                      ? std::vector<std::string>{gen.raw_text}
                                      : gen.samples;
            for (const auto& s : samples) {
                auto pa = parser::parse(s, TaskId::FD);
                if (pa.status == parser::ParseStatus::ok) mp.predictions.push_back(*pa.label);
            }
            fd_multi.push_back(std::move(mp));
        }
    }

    for (const auto& [task, preds] : preds_by_task) {
        auto table = metrics::score_single(preds, golds_by_task.at(task), task);
        out.report.tasks[std::string(task_name(task))] = metrics::report_for(table);
    }
    if (!fd_multi.empty()) {
        auto& fd_row = out.report.tasks[std::string(task_name(TaskId::FD))];
        fd_row.fd_multi = metrics::score_fd_multi(fd_multi);
        if (fd_row.n == 0) fd_row.n = static_cast<long long>(fd_multi.size());
    }
    out.report.metadata = std::move(metadata);
    return out;
}

}  // namespace amtk::scoring
