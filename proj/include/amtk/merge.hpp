#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amtk/rng.hpp"
#include "amtk/sha256.hpp"
#include "amtk/tasks.hpp"
#include "amtk/tensor.hpp"

namespace amtk::merge {

using tensor::Dtype;
using tensor::Tensor;
using tensor::TensorMap;

// Fine-tuned-minus-base parameter deltas, held in doubles so that
// reconstruction and combination stay exact for storage-dtype inputs.
struct TaskVector {
    std::string source_model;
    std::map<std::string, std::vector<double>> deltas;      // name -> elements
    std::map<std::string, std::vector<int64_t>> shapes;     // name -> shape
};

inline void check_same_structure(const TensorMap& a, const TensorMap& b,
                                 const std::string& what) {
    std::vector<std::string> missing, extra, mismatched;
    for (const auto& [name, t] : a.tensors) {
        auto it = b.tensors.find(name);
        if (it == b.tensors.end())
            missing.push_back(name);
        else if (it->second.shape != t.shape)
            mismatched.push_back(name);
    }
    for (const auto& [name, _] : b.tensors)
        if (!a.tensors.count(name)) extra.push_back(name);
    if (missing.empty() && extra.empty() && mismatched.empty()) return;
    std::string msg = what + ": tensor structure mismatch;";
    auto list = [&msg](const char* kind, const std::vector<std::string>& names) {
        if (names.empty()) return;
        msg += std::string(" ") + kind + ":";
        for (const auto& n : names) msg += " " + n;
        msg += ";";
    };
    list("missing", missing);
    list("unexpected", extra);
    list("shape-mismatch", mismatched);
    throw Error(msg);
}

inline TaskVector task_vector(const TensorMap& base, const TensorMap& tuned,
                              const std::string& model_id) {
    check_same_structure(base, tuned, "task_vector(" + model_id + ")");
    TaskVector tv;
    tv.source_model = model_id;
    for (const auto& [name, base_tensor] : base.tensors) {
        auto base_vals = tensor::to_doubles(base_tensor);
        auto tuned_vals = tensor::to_doubles(tuned.tensors.at(name));
        std::vector<double> delta(base_vals.size());
        for (size_t i = 0; i < delta.size(); ++i) delta[i] = tuned_vals[i] - base_vals[i];
        tv.deltas[name] = std::move(delta);
        tv.shapes[name] = base_tensor.shape;
    }
    return tv;
}

// ---- Pruning ----------------------------------------------------------------

// Keep probabilities for one tensor under the DELLA schedule: elements ranked
// by |magnitude| (ties by index), probabilities ramp linearly from rho-eps
// (smallest) to rho+eps (largest), clamped into (0, 1]. eps = 0 degenerates
// to the uniform DARE probability.
inline std::vector<double> keep_probabilities(const std::vector<double>& values, double rho,
                                              double epsilon) {
    size_t n = values.size();
    std::vector<double> p(n, rho);
    if (epsilon == 0.0 || n <= 1) {
        for (auto& v : p) v = std::min(v, 1.0);
        return p;
    }
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        double ma = std::fabs(values[a]), mb = std::fabs(values[b]);
        if (ma != mb) return ma < mb;
        return a < b;
    });
    for (size_t rank = 0; rank < n; ++rank) {
        double t = static_cast<double>(rank) / static_cast<double>(n - 1);
        double prob = rho - epsilon + 2.0 * epsilon * t;
        p[order[rank]] = std::min(prob, 1.0);
    }
    return p;
}

namespace detail {

inline void validate_rho_eps(double rho, double epsilon) {
    if (!(rho > 0.0) || rho > 1.0)
        throw Error("density rho must lie in (0, 1], got " + std::to_string(rho));
    if (epsilon < 0.0) throw Error("epsilon must be non-negative");
    if (epsilon > 0.0 && !(rho - epsilon > 0.0))
        throw Error("DELLA requires rho - epsilon > 0 (rho=" + std::to_string(rho) +
                    ", epsilon=" + std::to_string(epsilon) + ")");
}

// Shared sampling path for DARE and DELLA: per-element Bernoulli keep with
// probability p_i and 1/p_i rescaling, draws consumed in element order from a
// per-(seed, model, tensor) stream.
inline TaskVector prune_rescale(const TaskVector& tv, double rho, double epsilon,
                                uint64_t seed) {
    validate_rho_eps(rho, epsilon);
    TaskVector out;
    out.source_model = tv.source_model;
    out.shapes = tv.shapes;
    for (const auto& [name, values] : tv.deltas) {
        auto p = keep_probabilities(values, rho, epsilon);
        Rng rng(derive_seed(seed, tv.source_model, name));
        std::vector<double> pruned(values.size());
        for (size_t i = 0; i < values.size(); ++i) {
            double u = rng.next_double();
            pruned[i] = u < p[i] ? values[i] / p[i] : 0.0;
        }
        out.deltas[name] = std::move(pruned);
    }
    return out;
}

}  // namespace detail

// Random pruning: every element kept independently with probability rho and
// rescaled by 1/rho, so the expectation equals the input delta. rho = 1 is
// the no-prune identity.
inline TaskVector dare(const TaskVector& tv, double rho, uint64_t seed) {
    return detail::prune_rescale(tv, rho, 0.0, seed);
}

// Magnitude-adaptive pruning: keep probabilities ramp over magnitude ranks
// within each tensor, rescaling stays 1/p_i. Identical in distribution to
// dare() when epsilon = 0 (and bit-identical under the shared sampling path).
inline TaskVector della(const TaskVector& tv, double rho, double epsilon, uint64_t seed) {
    return detail::prune_rescale(tv, rho, epsilon, seed);
}

// merged = base + sum_i w_i * delta_i, accumulated in doubles, stored in the
// base dtype.
inline TensorMap combine(const TensorMap& base,
                         const std::vector<std::pair<const TaskVector*, double>>& processed) {
    for (const auto& [tv, w] : processed) {
        if (w < 0) throw Error("combine: negative weight");
        std::vector<std::string> bad;
        for (const auto& [name, t] : base.tensors) {
            auto it = tv->deltas.find(name);
            if (it == tv->deltas.end() ||
                it->second.size() != static_cast<size_t>(t.numel()))
                bad.push_back(name);
        }
        if (!bad.empty()) {
            std::string msg = "combine: task vector '" + tv->source_model +
                              "' incompatible with base on:";
            for (const auto& n : bad) msg += " " + n;
            throw Error(msg);
        }
    }
    TensorMap merged;
    merged.metadata = base.metadata;
    for (const auto& [name, base_tensor] : base.tensors) {
        auto acc = tensor::to_doubles(base_tensor);
        for (const auto& [tv, w] : processed) {
            const auto& delta = tv->deltas.at(name);
            for (size_t i = 0; i < acc.size(); ++i) acc[i] += w * delta[i];
        }
        merged.tensors[name] = tensor::from_doubles(acc, base_tensor.dtype, base_tensor.shape);
    }
    return merged;
}

// ---- Difficulty tiers --------------------------------------------------------

enum class Tier { hard, medium, easy };

inline std::string_view tier_name(Tier t) {
    switch (t) {
        case Tier::hard:   return "hard";
        case Tier::medium: return "medium";
        case Tier::easy:   return "easy";
    }
    throw Error("tier_name: invalid tier");
}

inline Tier tier_from_name(std::string_view name) {
    if (name == "hard") return Tier::hard;
    if (name == "medium") return Tier::medium;
    if (name == "easy") return Tier::easy;
    throw Error("unknown tier: " + std::string(name));
}

// The published assignment: hard = {FD, AQ, ET}, medium = {ACC, AR},
// easy = {CD, ED, SD}.
inline const std::map<TaskId, Tier>& default_tiers() {
    static const std::map<TaskId, Tier> tiers = {
        {TaskId::FD, Tier::hard},   {TaskId::AQ, Tier::hard},  {TaskId::ET, Tier::hard},
        {TaskId::ACC, Tier::medium}, {TaskId::AR, Tier::medium},
        {TaskId::CD, Tier::easy},   {TaskId::ED, Tier::easy},  {TaskId::SD, Tier::easy}};
    return tiers;
}

struct TierThresholds {
    double easy_floor = 0.60;
    double medium_floor = 0.50;
};

// Median F1 over the score list decides the tier: easy at or above the easy
// floor, medium at or above the medium floor, hard below. Overrides win.
inline std::map<TaskId, Tier> classify_difficulty(
    const std::map<TaskId, std::vector<double>>& score_table,
    const TierThresholds& thresholds = {},
    const std::map<TaskId, Tier>& overrides = {}) {
    if (score_table.empty()) throw Error("classify_difficulty: empty score table");
    if (!(0.0 < thresholds.medium_floor && thresholds.medium_floor < thresholds.easy_floor &&
          thresholds.easy_floor < 1.0))
        throw Error("classify_difficulty: thresholds must satisfy 0 < medium < easy < 1");
    std::map<TaskId, Tier> out;
    for (const auto& [task, scores] : score_table) {
        if (scores.empty())
            throw Error("classify_difficulty: no scores for " + std::string(task_name(task)));
        std::vector<double> sorted = scores;
        std::sort(sorted.begin(), sorted.end());
        size_t n = sorted.size();
        double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        Tier tier = median >= thresholds.easy_floor    ? Tier::easy
                    : median >= thresholds.medium_floor ? Tier::medium
                                                        : Tier::hard;
        auto ov = overrides.find(task);
        out[task] = ov != overrides.end() ? ov->second : tier;
    }
    return out;
}

// ---- Presets -----------------------------------------------------------------

enum class Method { DARE, DELLA };

struct TierParams {
    double rho = 1.0;
    std::optional<double> epsilon;  // DELLA only
    double weight = 0.0;
};

struct MergePreset {
    std::string name;
    Method method = Method::DARE;
    std::map<Tier, TierParams> params;

    const TierParams& for_tier(Tier t) const { return params.at(t); }
};

// The eight published configurations; tier order is (hard, medium, easy).
inline const std::vector<MergePreset>& preset_catalog() {
    static const std::vector<MergePreset> presets = [] {
        std::vector<MergePreset> out;
        auto dare_preset = [](std::string name, double rh, double rm, double re, double wh,
                              double wm, double we) {
            MergePreset p;
            p.name = std::move(name);
            p.method = Method::DARE;
            p.params[Tier::hard] = {rh, std::nullopt, wh};
            p.params[Tier::medium] = {rm, std::nullopt, wm};
            p.params[Tier::easy] = {re, std::nullopt, we};
            return p;
        };
        auto della_preset = [](std::string name, double rh, double rm, double re, double eh,
                               double em, double ee, double wh, double wm, double we) {
            MergePreset p;
            p.name = std::move(name);
            p.method = Method::DELLA;
            p.params[Tier::hard] = {rh, eh, wh};
            p.params[Tier::medium] = {rm, em, wm};
            p.params[Tier::easy] = {re, ee, we};
            return p;
        };
        out.push_back(dare_preset("DARE I", 0.5, 0.5, 0.5, 0.125, 0.125, 0.125));
        out.push_back(dare_preset("DARE II", 0.7, 0.7, 0.7, 0.125, 0.125, 0.125));
        out.push_back(dare_preset("DARE III", 0.85, 0.8, 0.5, 0.125, 0.125, 0.125));
        out.push_back(dare_preset("DARE IV", 0.8, 0.8, 0.8, 0.2, 0.15, 0.03));
        out.push_back(dare_preset("DARE V", 0.85, 0.8, 0.5, 0.2, 0.15, 0.03));
        out.push_back(della_preset("DELLA I", 0.85, 0.8, 0.5, 0.1, 0.1, 0.4,
                                   0.125, 0.125, 0.125));
        out.push_back(della_preset("DELLA II", 0.9, 0.7, 0.5, 0.1, 0.15, 0.4,
                                   0.2, 0.15, 0.03));
        out.push_back(della_preset("DELLA III", 0.9, 0.85, 0.8, 0.05, 0.1, 0.1,
                                   0.2, 0.15, 0.03));
        return out;
    }();
    return presets;
}

inline const MergePreset& emit_preset(const std::string& name) {
    for (const auto& p : preset_catalog())
        if (p.name == name) return p;
    throw Error("unknown merge preset: " + name);
}

inline void to_json(Json& j, const MergePreset& p) {
    j = Json::object();
    j["name"] = p.name;
    j["method"] = p.method == Method::DARE ? "DARE" : "DELLA";
    for (Tier t : {Tier::hard, Tier::medium, Tier::easy}) {
        const auto& tp = p.for_tier(t);
        Json jt{{"rho", tp.rho}, {"weight", tp.weight}};
        if (tp.epsilon) jt["epsilon"] = *tp.epsilon;
        j["tiers"][std::string(tier_name(t))] = std::move(jt);
    }
}

// ---- End-to-end merge ---------------------------------------------------------

struct MergeManifest {
    std::string preset;
    uint64_t seed = 0;
    std::map<std::string, std::string> model_tiers;      // task -> tier
    std::map<std::string, std::string> input_checksums;  // path -> sha256
    std::string output_checksum;
};

inline void to_json(Json& j, const MergeManifest& m) {
    j = Json{{"preset", m.preset},
             {"seed", m.seed},
             {"model_tiers", m.model_tiers},
             {"input_checksums", m.input_checksums},
             {"output_checksum", m.output_checksum}};
}

// Loads base plus per-task fine-tuned checkpoints, prunes each task vector
// with its tier's parameters, combines with the tier weights, and saves the
// merged model plus a manifest. Any load failure aborts before anything is
// written.
inline MergeManifest merge_run(const std::string& base_path,
                               const std::map<TaskId, std::string>& model_paths,
                               const MergePreset& preset, uint64_t seed,
                               const std::string& out_path,
                               const std::map<TaskId, Tier>& tiers = default_tiers()) {
    if (model_paths.empty()) throw Error("merge_run: no fine-tuned models given");
    TensorMap base = tensor::load_file(base_path);
    MergeManifest manifest;
    manifest.preset = preset.name;
    manifest.seed = seed;
    manifest.input_checksums[base_path] = sha256_file_hex(base_path);

    std::vector<TaskVector> pruned;
    std::vector<double> weights;
    for (TaskId task : kAllTasks) {  // fixed order
        auto it = model_paths.find(task);
        if (it == model_paths.end()) continue;
        TensorMap tuned = tensor::load_file(it->second);
        Tier tier = tiers.at(task);
        const TierParams& params = preset.for_tier(tier);
        TaskVector tv = task_vector(base, tuned, std::string(task_name(task)));
        pruned.push_back(preset.method == Method::DELLA
                             ? della(tv, params.rho, params.epsilon.value_or(0.0), seed)
                             : dare(tv, params.rho, seed));
        weights.push_back(params.weight);
        manifest.model_tiers[std::string(task_name(task))] = std::string(tier_name(tier));
        manifest.input_checksums[it->second] = sha256_file_hex(it->second);
    }
    std::vector<std::pair<const TaskVector*, double>> processed;
    for (size_t i = 0; i < pruned.size(); ++i) processed.emplace_back(&pruned[i], weights[i]);
    TensorMap merged = combine(base, processed);
    tensor::save_file(merged, out_path);
    manifest.output_checksum = sha256_file_hex(out_path);
    return manifest;
}

}  // namespace amtk::merge
