#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/rng.hpp"
#include "amtk/tasks.hpp"
#include "amtk/util.hpp"

namespace amtk::sampler {

enum class Split { train, val, test };

inline std::string_view split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val:   return "val";
        case Split::test:  return "test";
    }
    throw Error("split_name: invalid split");
}

inline Split split_from_name(std::string_view name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw Error("unknown split: " + std::string(name));
}

// Largest-remainder apportionment of `total` into integer parts proportional
// to `weights`. Remainder ties are broken by ascending `tie_priority` (lower
// value wins first). Exact integer arithmetic throughout.
inline std::vector<long long> apportion(const std::vector<long long>& weights, long long total,
                                        const std::vector<int>& tie_priority) {
    if (weights.size() != tie_priority.size())
        throw Error("apportion: weights/tie_priority size mismatch");
    __int128 weight_sum = 0;
    for (long long w : weights) {
        if (w < 0) throw Error("apportion: negative weight");
        weight_sum += w;
    }
    if (weight_sum == 0) {
        if (total == 0) return std::vector<long long>(weights.size(), 0);
        throw Error("apportion: zero total weight");
    }
    std::vector<long long> quota(weights.size());
    std::vector<__int128> remainder(weights.size());
    long long assigned = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        __int128 product = static_cast<__int128>(weights[i]) * total;
        quota[i] = static_cast<long long>(product / weight_sum);
        remainder[i] = product % weight_sum;
        assigned += quota[i];
    }
    std::vector<size_t> order(weights.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return tie_priority[a] < tie_priority[b];
    });
    for (long long leftover = total - assigned; leftover > 0; --leftover)
        quota[order[static_cast<size_t>(total - assigned - leftover)]] += 1;
    return quota;
}

struct SplitSizes {
    long long train = 0, val = 0, test = 0;
};

// 60/20/20 by largest remainder; the val/test remainders always tie and the
// tie goes to val.
inline SplitSizes split_sizes(long long n) {
    if (n < 3) throw Error("dataset too small to split (need at least 3 instances)");
    auto parts = apportion({3, 1, 1}, n, {2, 0, 1});  // tie priority: val, test, train
    return {parts[0], parts[1], parts[2]};
}

struct SplitManifest {
    std::string dataset;
    uint64_t seed = 0;
    std::map<std::string, Split> assignment;  // instance id -> split
};

inline void to_json(Json& j, const SplitManifest& m) {
    Json assign = Json::object();
    for (const auto& [id, s] : m.assignment) assign[id] = std::string(split_name(s));
    j = Json{{"dataset", m.dataset}, {"seed", m.seed}, {"assignment", std::move(assign)}};
}

inline void from_json(const Json& j, SplitManifest& m) {
    m.dataset = j.at("dataset").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.assignment.clear();
    for (const auto& [id, s] : j.at("assignment").items())
        m.assignment[id] = split_from_name(s.get<std::string>());
}

// Deterministic 60/20/20 assignment: ids are sorted, shuffled under a seed
// derived from (seed, dataset), then cut contiguously. Input order is
// irrelevant by construction.
inline SplitManifest split(const std::vector<std::string>& instance_ids,
                           const std::string& dataset, uint64_t seed) {
    std::vector<std::string> ids = instance_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    SplitSizes sizes = split_sizes(static_cast<long long>(ids.size()));
    Rng rng(derive_seed(seed, dataset));
    shuffle_fisher_yates(ids, rng);
    SplitManifest manifest{dataset, seed, {}};
    for (size_t i = 0; i < ids.size(); ++i) {
        Split s = i < static_cast<size_t>(sizes.train)              ? Split::train
                  : i < static_cast<size_t>(sizes.train + sizes.val) ? Split::val
                                                                     : Split::test;
        manifest.assignment[ids[i]] = s;
    }
    return manifest;
}

// Per-(class, dataset) instance counts for one task.
struct ClassCountTable {
    TaskId task = TaskId::ACC;
    std::map<std::string, std::map<std::string, long long>> counts;  // class -> dataset -> n

    long long at(const std::string& cls, const std::string& dataset) const {
        auto ci = counts.find(cls);
        if (ci == counts.end()) return 0;
        auto di = ci->second.find(dataset);
        return di == ci->second.end() ? 0 : di->second;
    }
    long long class_total(const std::string& cls) const {
        long long sum = 0;
        auto ci = counts.find(cls);
        if (ci != counts.end())
            for (const auto& [d, n] : ci->second) sum += n;
        return sum;
    }
};

// The instance's sampling class: its single gold label (first label of the
// sorted set for multi-label FD instances).
inline const std::string& instance_class(const TaskInstance& inst) {
    if (inst.gold.empty()) throw Error("instance without gold label: " + inst.id);
    return inst.gold.front();
}

inline ClassCountTable count_classes(const std::vector<TaskInstance>& instances, TaskId task) {
    ClassCountTable table;
    table.task = task;
    for (const auto& inst : instances) {
        if (inst.task != task) continue;
        table.counts[instance_class(inst)][inst.dataset] += 1;
    }
    return table;
}

// r_{c,d} = NumEl(c,d) / sum_d' NumEl(c,d'), as an exact rational.
inline Fraction ratio(const ClassCountTable& table, const std::string& cls,
                      const std::string& dataset) {
    long long total = table.class_total(cls);
    if (total == 0) throw Error("empty class: " + cls);
    return Fraction(table.at(cls, dataset), total);
}

struct SamplePlan {
    TaskId task = TaskId::ACC;
    long long n_sample = 0;
    std::map<std::string, std::map<std::string, long long>> quotas;  // class -> dataset -> n

    long long cell(const std::string& cls, const std::string& dataset) const {
        auto ci = quotas.find(cls);
        if (ci == quotas.end()) return 0;
        auto di = ci->second.find(dataset);
        return di == ci->second.end() ? 0 : di->second;
    }
};

inline void to_json(Json& j, const SamplePlan& p) {
    j = Json{{"task", std::string(task_name(p.task))},
             {"n_sample", p.n_sample},
             {"quotas", p.quotas}};
}

inline void from_json(const Json& j, SamplePlan& p) {
    p.task = task_from_name(j.at("task").get<std::string>());
    p.n_sample = j.at("n_sample").get<long long>();
    p.quotas = j.at("quotas")
                   .get<std::map<std::string, std::map<std::string, long long>>>();
}

// Classes present in the table, ordered by the task's label catalog (stray
// classes, which validation normally excludes, come last alphabetically).
inline std::vector<std::string> table_classes(const ClassCountTable& table) {
    std::vector<std::string> classes;
    for (const auto& l : label_catalog(table.task))
        if (table.counts.count(l)) classes.push_back(l);
    for (const auto& [c, _] : table.counts)
        if (std::find(classes.begin(), classes.end(), c) == classes.end())
            classes.push_back(c);
    return classes;
}

// Splits n_sample evenly across classes, then apportions each class's share
// across datasets by the class ratios (largest remainder; ties to the
// lexicographically first dataset). Fails loudly when a class cannot fill
// its share.
inline SamplePlan plan(const ClassCountTable& table, long long n_sample) {
    if (n_sample <= 0) throw Error("plan: n_sample must be positive");
    std::vector<std::string> classes = table_classes(table);
    if (classes.empty()) throw Error("plan: empty count table");

    std::vector<int> class_priority(classes.size());
    for (size_t i = 0; i < classes.size(); ++i) class_priority[i] = static_cast<int>(i);
    auto class_share = apportion(std::vector<long long>(classes.size(), 1), n_sample,
                                 class_priority);

    SamplePlan result;
    result.task = table.task;
    result.n_sample = n_sample;
    for (size_t ci = 0; ci < classes.size(); ++ci) {
        const std::string& cls = classes[ci];
        long long share = class_share[ci];
        long long available = table.class_total(cls);
        if (available < share)
            throw Error("insufficient instances for class '" + cls + "': need " +
                        std::to_string(share) + ", have " + std::to_string(available) +
                        " (short by " + std::to_string(share - available) + ")");
        std::vector<std::string> datasets;
        for (const auto& [d, _] : table.counts.at(cls)) datasets.push_back(d);
        std::sort(datasets.begin(), datasets.end());
        std::vector<long long> weights;
        std::vector<int> priority;
        for (size_t i = 0; i < datasets.size(); ++i) {
            weights.push_back(table.at(cls, datasets[i]));
            priority.push_back(static_cast<int>(i));
        }
        auto cell_quota = apportion(weights, share, priority);
        for (size_t i = 0; i < datasets.size(); ++i) {
            if (cell_quota[i] > weights[i])
                throw Error("plan: cell quota exceeds population for class '" + cls +
                            "', dataset '" + datasets[i] + "'");
            if (cell_quota[i] > 0) result.quotas[cls][datasets[i]] = cell_quota[i];
        }
    }
    return result;
}

// Uniform without-replacement draw realizing the plan inside one split.
// Every cell uses its own RNG stream derived from (seed, task, split, class,
// dataset), so results do not depend on iteration or input order.
inline std::vector<TaskInstance> draw_split(const std::vector<TaskInstance>& pool,
                                            const SamplePlan& plan_for_split, Split which,
                                            uint64_t seed) {
    std::map<std::string, std::map<std::string, std::vector<const TaskInstance*>>> cells;
    for (const auto& inst : pool) cells[instance_class(inst)][inst.dataset].push_back(&inst);
    for (auto& [c, by_dataset] : cells)
        for (auto& [d, items] : by_dataset)
            std::sort(items.begin(), items.end(),
                      [](const TaskInstance* a, const TaskInstance* b) { return a->id < b->id; });

    std::vector<TaskInstance> out;
    for (const auto& [cls, by_dataset] : plan_for_split.quotas) {
        for (const auto& [dataset, quota] : by_dataset) {
            if (quota == 0) continue;
            auto ci = cells.find(cls);
            const std::vector<const TaskInstance*>* items = nullptr;
            if (ci != cells.end()) {
                auto di = ci->second.find(dataset);
                if (di != ci->second.end()) items = &di->second;
            }
            size_t have = items ? items->size() : 0;
            if (have < static_cast<size_t>(quota))
                throw Error("infeasible cell (" + cls + ", " + dataset + ") in split '" +
                            std::string(split_name(which)) + "': need " +
                            std::to_string(quota) + ", have " + std::to_string(have));
            std::string stream = std::string(task_name(plan_for_split.task)) + "/" +
                                 std::string(split_name(which)) + "/" + cls + "/" + dataset;
            Rng rng(derive_seed(seed, stream));
            for (size_t idx : sample_indices(have, static_cast<size_t>(quota), rng))
                out.push_back(*(*items)[idx]);
        }
    }
    return out;
}

struct DrawResult {
    std::vector<TaskInstance> train, val, test;
};

// Samples each split independently against its own plan.
inline DrawResult draw(const std::map<Split, std::vector<TaskInstance>>& instances_by_split,
                       const std::map<Split, SamplePlan>& plans, uint64_t seed) {
    DrawResult out;
    for (const auto& [which, plan_for_split] : plans) {
        auto it = instances_by_split.find(which);
        static const std::vector<TaskInstance> empty;
        const auto& pool = it == instances_by_split.end() ? empty : it->second;
        auto drawn = draw_split(pool, plan_for_split, which, seed);
        switch (which) {
            case Split::train: out.train = std::move(drawn); break;
            case Split::val:   out.val = std::move(drawn); break;
            case Split::test:  out.test = std::move(drawn); break;
        }
    }
    return out;
}

}  // namespace amtk::sampler
