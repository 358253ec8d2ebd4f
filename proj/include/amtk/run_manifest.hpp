#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/sha256.hpp"

namespace amtk::manifest {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Per-stage bookkeeping inside a run directory: inputs and outputs with
// checksums, parameters, and seed. A stage whose entry matches the current
// inputs/params and whose outputs still verify is up to date and skipped.
struct StageEntry {
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256
    Json params;
    std::string timestamp;
    std::string tool_version;
};

inline void to_json(Json& j, const StageEntry& e) {
    j = Json{{"inputs", e.inputs},
             {"outputs", e.outputs},
             {"params", e.params},
             {"timestamp", e.timestamp},
             {"tool_version", e.tool_version}};
}

inline void from_json(const Json& j, StageEntry& e) {
    e.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    e.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    e.params = j.at("params");
    e.timestamp = j.value("timestamp", "");
    e.tool_version = j.value("tool_version", "");
}

class RunManifest {
public:
    explicit RunManifest(const std::string& run_dir)
        : dir_(run_dir), path_((std::filesystem::path(run_dir) / "manifest.json").string()) {
        std::filesystem::create_directories(dir_);
        if (std::filesystem::exists(path_)) {
            std::ifstream in(path_);
            Json j = Json::parse(in, nullptr, false);
            if (!j.is_discarded() && j.contains("stages"))
                for (const auto& [key, entry] : j.at("stages").items())
                    stages_[key] = entry.get<StageEntry>();
        }
    }

    // True when the recorded entry matches these inputs/params and all
    // recorded outputs still exist with their recorded checksums.
    bool up_to_date(const std::string& stage_key,
                    const std::map<std::string, std::string>& input_hashes,
                    const Json& params) const {
        auto it = stages_.find(stage_key);
        if (it == stages_.end()) return false;
        const StageEntry& e = it->second;
        if (e.inputs != input_hashes || e.params != params) return false;
        for (const auto& [path, hash] : e.outputs) {
            if (!std::filesystem::exists(path)) return false;
            if (sha256_file_hex(path) != hash) return false;
        }
        return true;
    }

    void record(const std::string& stage_key,
                const std::map<std::string, std::string>& input_hashes,
                const std::vector<std::string>& output_paths, const Json& params) {
        StageEntry e;
        e.inputs = input_hashes;
        for (const auto& p : output_paths) e.outputs[p] = sha256_file_hex(p);
        e.params = params;
        e.tool_version = std::string(kToolVersion);
        auto now = std::chrono::system_clock::now();
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
        e.timestamp = std::to_string(secs.count());
        stages_[stage_key] = std::move(e);
        save();
    }

    const std::string& dir() const { return dir_; }

private:
    void save() const {
        Json j;
        j["tool_version"] = std::string(kToolVersion);
        j["stages"] = stages_;
        std::ofstream out(path_, std::ios::binary);
        if (!out) throw Error("cannot write manifest: " + path_);
        out << j.dump(2) << "\n";
    }

    std::string dir_;
    std::string path_;
    std::map<std::string, StageEntry> stages_;
};

inline std::map<std::string, std::string> hash_files(const std::vector<std::string>& paths) {
    std::map<std::string, std::string> out;
    for (const auto& p : paths) out[p] = sha256_file_hex(p);
    return out;
}

}  // namespace amtk::manifest
