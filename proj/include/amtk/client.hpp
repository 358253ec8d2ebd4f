#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "amtk/corpus.hpp"
#include "amtk/sha256.hpp"
#include "amtk/util.hpp"

namespace amtk::client {

struct EndpointConfig {
    std::string base_url;  // e.g. http://127.0.0.1:8080
    std::string model;
    double temperature = 0.0;
    int max_tokens = 64;
    int timeout_ms = 30000;
    int max_parallel = 4;
    int retries = 2;
    int backoff_ms = 250;     // doubled per retry
    int n_completions = 1;    // >1 samples multiple generations per instance
    std::string api_key;      // usually from the environment

    void validate() const {
        if (base_url.empty()) throw Error("endpoint base_url is empty");
        if (max_parallel < 1) throw Error("max_parallel must be >= 1");
        if (retries < 0) throw Error("retries must be >= 0");
        if (temperature < 0) throw Error("temperature must be >= 0");
        if (n_completions < 1) throw Error("n_completions must be >= 1");
    }
};

struct GenerationRecord {
    std::string id;
    std::string prompt_sha256;
    std::string raw_text;                  // first completion; empty on terminal error
    std::vector<std::string> samples;      // all completions when n_completions > 1
    double latency_ms = 0;
    int attempts = 0;
    std::string model;
    bool ok = false;
    std::string error;
};

inline void to_json(Json& j, const GenerationRecord& r) {
    j = Json{{"id", r.id},
             {"prompt_sha256", r.prompt_sha256},
             {"latency_ms", r.latency_ms},
             {"attempts", r.attempts},
             {"model", r.model},
             {"status", r.ok ? "ok" : "error"}};
    if (r.ok) j["raw_text"] = r.raw_text;
    if (r.samples.size() > 1) j["samples"] = r.samples;
    if (!r.error.empty()) j["error"] = r.error;
}

inline void from_json(const Json& j, GenerationRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.prompt_sha256 = j.value("prompt_sha256", "");
    r.latency_ms = j.value("latency_ms", 0.0);
    r.attempts = j.value("attempts", 0);
    r.model = j.value("model", "");
    r.ok = j.at("status").get<std::string>() == "ok";
    r.raw_text = j.value("raw_text", "");
    if (j.contains("samples")) r.samples = j.at("samples").get<std::vector<std::string>>();
    if (r.samples.empty() && r.ok) r.samples.push_back(r.raw_text);
    r.error = j.value("error", "");
}

struct CompletionResult {
    bool ok = false;
    std::string text;
    std::string error;
    int attempts = 0;
};

namespace detail {

inline bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

}  // namespace detail

// One chat-completion request with retry + exponential backoff on transient
// failures (connection errors, timeouts, 429/5xx). The first choice's message
// content is returned verbatim.
inline CompletionResult complete(const std::string& prompt, const EndpointConfig& cfg) {
    cfg.validate();
    if (prompt.empty()) return {false, "", "empty prompt", 0};
    httplib::Client http(cfg.base_url);
    http.set_connection_timeout(0, cfg.timeout_ms * 1000);
    http.set_read_timeout(0, cfg.timeout_ms * 1000);
    http.set_write_timeout(0, cfg.timeout_ms * 1000);
    if (!cfg.api_key.empty()) http.set_bearer_token_auth(cfg.api_key);

    Json body{{"model", cfg.model},
              {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", cfg.temperature},
              {"max_tokens", cfg.max_tokens}};
    std::string payload = body.dump();

    CompletionResult result;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        result.attempts = attempt + 1;
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(
                static_cast<long long>(cfg.backoff_ms) << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        auto res = http.Post("/chat/completions", payload, "application/json");
        if (!res) {
            result.error = "connection/timeout: " + httplib::to_string(res.error());
            continue;  // transient
        }
        if (detail::transient_status(res->status)) {
            result.error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            result.error = "HTTP " + std::to_string(res->status);
            return result;  // terminal
        }
        Json parsed = Json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            result.error = "protocol error: non-JSON response";
            return result;  // terminal
        }
        try {
            result.text =
                parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            result.error = std::string("protocol error: ") + e.what();
            return result;
        }
        result.ok = true;
        result.error.clear();
        return result;
    }
    return result;  // retries exhausted
}

struct PromptItem {
    std::string id;
    std::string prompt;
};

inline void to_json(Json& j, const PromptItem& p) {
    j = Json{{"id", p.id}, {"prompt", p.prompt}, {"prompt_sha256", sha256_hex(p.prompt)}};
}
inline void from_json(const Json& j, PromptItem& p) {
    p.id = j.at("id").get<std::string>();
    p.prompt = j.at("prompt").get<std::string>();
}

// Dispatches a batch with at most cfg.max_parallel requests in flight.
// Returned records follow the input order regardless of completion order.
// When out_path is given the batch is resumable: ids already recorded as ok
// are skipped, failures are retried, and the file is rewritten in input
// order at the end (completed work is appended incrementally in between).
inline std::vector<GenerationRecord> run_batch(const std::vector<PromptItem>& items,
                                               const EndpointConfig& cfg,
                                               const std::string& out_path = "") {
    cfg.validate();
    std::map<std::string, GenerationRecord> done;
    if (!out_path.empty() && std::filesystem::exists(out_path)) {
        for (auto& rec : read_jsonl_file<GenerationRecord>(out_path))
            if (rec.ok) done[rec.id] = std::move(rec);
    }

    std::vector<GenerationRecord> records(items.size());
    std::vector<size_t> todo;
    for (size_t i = 0; i < items.size(); ++i) {
        auto it = done.find(items[i].id);
        if (it != done.end())
            records[i] = it->second;
        else
            todo.push_back(i);
    }

    std::ofstream append_out;
    std::mutex write_mutex;
    if (!out_path.empty())
        append_out.open(out_path, std::ios::binary | std::ios::app);

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t slot = next.fetch_add(1);
            if (slot >= todo.size()) return;
            size_t i = todo[slot];
            const PromptItem& item = items[i];
            GenerationRecord rec;
            rec.id = item.id;
            rec.prompt_sha256 = sha256_hex(item.prompt);
            rec.model = cfg.model;
            auto t0 = std::chrono::steady_clock::now();
            bool all_ok = true;
            int attempts = 0;
            for (int k = 0; k < cfg.n_completions && all_ok; ++k) {
                CompletionResult res = complete(item.prompt, cfg);
                attempts += res.attempts;
                if (!res.ok) {
                    all_ok = false;
                    rec.error = res.error;
                } else {
                    rec.samples.push_back(res.text);
                }
            }
            rec.attempts = attempts;
            rec.latency_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            if (all_ok) {
                rec.ok = true;
                rec.raw_text = rec.samples.front();
            } else {
                rec.samples.clear();
                rec.raw_text.clear();
            }
            {
                std::lock_guard<std::mutex> lock(write_mutex);
                records[i] = rec;
                if (append_out.is_open()) {
                    Json j = rec;
                    append_out << j.dump() << "\n";
                    append_out.flush();
                }
            }
        }
    };

    size_t n_workers = std::min<size_t>(static_cast<size_t>(cfg.max_parallel), todo.size());
    std::vector<std::thread> workers;
    for (size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
    for (auto& t : workers) t.join();

    if (!out_path.empty()) {
        append_out.close();
        write_jsonl_file(records, out_path);  // one record per id, input order
    }
    return records;
}

inline std::string api_key_from_env() {
    const char* key = std::getenv("AMTK_API_KEY");
    return key ? key : "";
}

}  // namespace amtk::client
