#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "amtk/corpus.hpp"
#include "amtk/tasks.hpp"

namespace amtk::adapters {

struct Reject {
    std::string source;  // record id, line number, or row number
    std::string reason;
};

inline void to_json(Json& j, const Reject& r) {
    j = Json{{"source", r.source}, {"reason", r.reason}};
}
inline void from_json(const Json& j, Reject& r) {
    r.source = j.at("source").get<std::string>();
    r.reason = j.at("reason").get<std::string>();
}

struct IngestResult {
    std::vector<CorpusRecord> records;
    std::vector<Reject> rejects;
};

// Column-mapping manifest for the tabular datasets:
//   {"dataset_id": "...", "format": "csv"|"tsv", "header": true,
//    "column_map": {"text": "sentence", "label": 3, "extras.claim": "claim"}}
// Core fields: id, topic, stance, text, label, claim, title, full_text.
// "extras.<key>" routes a column into the extras map; "quality.<dim>" routes
// it into extras as "quality:<dim>".
struct CsvManifest {
    std::string dataset_id;
    std::string format = "csv";
    bool header = true;
    std::map<std::string, Json> column_map;  // field -> column name or index
};

inline void from_json(const Json& j, CsvManifest& m) {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.format = j.value("format", "csv");
    m.header = j.value("header", true);
    m.column_map = j.at("column_map").get<std::map<std::string, Json>>();
}

inline void to_json(Json& j, const CsvManifest& m) {
    j = Json{{"dataset_id", m.dataset_id},
             {"format", m.format},
             {"header", m.header},
             {"column_map", m.column_map}};
}

namespace detail {

// RFC-4180-style CSV: quoted fields, doubled quotes, embedded separators and
// newlines inside quotes.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text, char sep) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            row_started = true;
        } else if (c == sep) {
            row.push_back(std::move(field));
            field.clear();
            row_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (row_started || !field.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                row_started = false;
            }
        } else {
            field.push_back(c);
            row_started = true;
        }
    }
    if (row_started || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Validate, then either append to records or log one reject.
inline void accept_or_reject(CorpusRecord&& rec, IngestResult& out) {
    if (auto why = validate_record(rec)) {
        out.rejects.push_back({rec.id.empty() ? "<unknown>" : rec.id, *why});
    } else {
        out.records.push_back(std::move(rec));
    }
}

}  // namespace detail

// ---- Microtext arggraph XML -----------------------------------------------
// edus become units; adus plus their seg edges become components; non-seg
// edges become relations (targets may chain onto other relations). The adu
// with no outgoing non-seg edge is the record's central claim.
inline IngestResult ingest_microtext_xml(const std::string& path, const std::string& dataset_id) {
    namespace pt = boost::property_tree;
    IngestResult out;
    pt::ptree tree;
    try {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open: " + path);
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(std::string("XML parse failure: ") + e.what());
    }

    for (const auto& [name, graph] : tree) {
        if (name != "arggraph") continue;
        CorpusRecord rec;
        rec.dataset = dataset_id;
        rec.id = graph.get<std::string>("<xmlattr>.id", "");
        if (auto topic = graph.get_optional<std::string>("<xmlattr>.topic_id")) rec.topic = *topic;
        if (auto stance = graph.get_optional<std::string>("<xmlattr>.stance")) rec.stance = *stance;

        struct Adu { std::string id, type; };
        std::vector<Adu> adus;
        struct Edge { std::string id, src, trg, type; };
        std::vector<Edge> seg_edges, rel_edges;
        bool malformed = false;
        for (const auto& [child_name, child] : graph) {
            if (child_name == "edu") {
                rec.units.push_back({child.get<std::string>("<xmlattr>.id", ""),
                                     child.get_value<std::string>()});
            } else if (child_name == "adu") {
                adus.push_back({child.get<std::string>("<xmlattr>.id", ""),
                                child.get<std::string>("<xmlattr>.type", "")});
            } else if (child_name == "edge") {
                Edge e{child.get<std::string>("<xmlattr>.id", ""),
                       child.get<std::string>("<xmlattr>.src", ""),
                       child.get<std::string>("<xmlattr>.trg", ""),
                       child.get<std::string>("<xmlattr>.type", "")};
                if (e.id.empty() || e.src.empty() || e.trg.empty() || e.type.empty()) {
                    out.rejects.push_back({rec.id, "edge with missing attribute"});
                    malformed = true;
                    break;
                }
                (e.type == "seg" ? seg_edges : rel_edges).push_back(std::move(e));
            }
        }
        if (malformed) continue;

        std::map<std::string, std::string> adu_unit;  // adu id -> unit id
        for (const auto& e : seg_edges) adu_unit[e.trg] = e.src;
        std::set<std::string> has_outgoing;
        for (const auto& e : rel_edges) has_outgoing.insert(e.src);

        for (const auto& a : adus) {
            auto it = adu_unit.find(a.id);
            if (it == adu_unit.end()) {
                out.rejects.push_back({rec.id, "adu '" + a.id + "' has no segment edge"});
                malformed = true;
                break;
            }
            Component c;
            c.id = a.id;
            c.unit = it->second;
            c.label = has_outgoing.count(a.id) ? "Premise" : "Claim";
            if (!a.type.empty()) c.stance = a.type;
            rec.components.push_back(std::move(c));
        }
        if (malformed) continue;

        for (const auto& e : rel_edges) rec.relations.push_back({e.id, e.src, e.trg, e.type});
        detail::accept_or_reject(std::move(rec), out);
    }
    return out;
}

// ---- MAFALDA JSONL ---------------------------------------------------------
// Each line carries a text plus per-sentence fallacy annotations in the
// string-encoded "sentences_with_labels" object. Sentences become units in
// their original order; every (sentence, fallacy) pair becomes a component.
inline IngestResult ingest_mafalda_jsonl(const std::string& path, const std::string& dataset_id) {
    IngestResult out;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::string where = path + ":" + std::to_string(line_no);
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            out.rejects.push_back({where, "malformed JSON line"});
            continue;
        }
        CorpusRecord rec;
        rec.dataset = dataset_id;
        char idbuf[32];
        std::snprintf(idbuf, sizeof idbuf, "%s-%06zu", dataset_id.c_str(), line_no);
        rec.id = idbuf;
        if (!j.contains("text") || !j.contains("sentences_with_labels")) {
            out.rejects.push_back({where, "missing text or sentences_with_labels"});
            continue;
        }
        std::string text = j.at("text").get<std::string>();
        rec.extras["full_text"] = text;
        // "TITLE: ... POST: ..." convention; the slice between the markers is
        // the title.
        if (text.rfind("TITLE:", 0) == 0) {
            size_t start = 6;
            while (start < text.size() && text[start] == ' ') ++start;
            size_t end = text.find("POST:", start);
            if (end == std::string::npos) end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            rec.extras["title"] = trim(text.substr(start, end - start));
        }
        auto sentences = nlohmann::ordered_json::parse(
            j.at("sentences_with_labels").get<std::string>(), nullptr, false);
        if (sentences.is_discarded() || !sentences.is_object()) {
            out.rejects.push_back({where, "malformed sentences_with_labels"});
            continue;
        }
        int unit_no = 0;
        bool bad = false;
        for (const auto& [sentence, annotations] : sentences.items()) {
            std::string unit_id = "u" + std::to_string(++unit_no);
            rec.units.push_back({unit_id, sentence});
            std::vector<std::string> labels;
            if (!annotations.is_array()) { bad = true; break; }
            for (const auto& group : annotations) {
                if (group.is_array())
                    for (const auto& l : group) labels.push_back(l.get<std::string>());
                else if (group.is_string())
                    labels.push_back(group.get<std::string>());
            }
            std::sort(labels.begin(), labels.end());
            labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
            int comp_no = 0;
            for (const auto& l : labels) {
                Component c;
                c.id = unit_id + "f" + std::to_string(++comp_no);
                c.unit = unit_id;
                c.label = l;
                rec.components.push_back(std::move(c));
            }
        }
        if (bad) {
            out.rejects.push_back({where, "malformed annotation group"});
            continue;
        }
        detail::accept_or_reject(std::move(rec), out);
    }
    return out;
}

// ---- Generic CSV/TSV -------------------------------------------------------
inline IngestResult ingest_csv(const std::string& path, const CsvManifest& manifest) {
    IngestResult out;
    char sep = manifest.format == "tsv" ? '\t' : ',';
    auto rows = detail::parse_csv(detail::read_file(path), sep);
    if (rows.empty()) return out;

    std::map<std::string, size_t> header_index;
    size_t first_row = 0;
    if (manifest.header) {
        for (size_t i = 0; i < rows[0].size(); ++i) header_index[trim(rows[0][i])] = i;
        first_row = 1;
    }
    // Resolve the column map once against the header.
    std::map<std::string, size_t> field_col;
    for (const auto& [field, col] : manifest.column_map) {
        if (col.is_number_integer()) {
            field_col[field] = col.get<size_t>();
        } else {
            auto it = header_index.find(col.get<std::string>());
            if (it == header_index.end())
                throw Error("column '" + col.get<std::string>() + "' not in header of " + path);
            field_col[field] = it->second;
        }
    }
    auto cell = [&](const std::vector<std::string>& row, const std::string& field)
        -> std::optional<std::string> {
        auto it = field_col.find(field);
        if (it == field_col.end() || it->second >= row.size()) return std::nullopt;
        return row[it->second];
    };

    for (size_t r = first_row; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::string where = path + ":row" + std::to_string(r + 1);
        CorpusRecord rec;
        rec.dataset = manifest.dataset_id;
        if (auto id = cell(row, "id"); id && !id->empty())
            rec.id = manifest.dataset_id + "-" + *id;
        else {
            char idbuf[32];
            std::snprintf(idbuf, sizeof idbuf, "-%06zu", r + 1);
            rec.id = manifest.dataset_id + idbuf;
        }
        if (auto v = cell(row, "topic"); v && !v->empty()) rec.topic = *v;
        if (auto v = cell(row, "stance"); v && !v->empty()) rec.stance = *v;
        auto text = cell(row, "text");
        if (!text || text->empty()) {
            out.rejects.push_back({where, "missing text column"});
            continue;
        }
        rec.units.push_back({"u1", *text});
        if (auto label = cell(row, "label"); label && !label->empty()) {
            Component c;
            c.id = "c1";
            c.unit = "u1";
            c.label = *label;
            if (rec.stance) c.stance = rec.stance;
            rec.components.push_back(std::move(c));
        }
        for (const auto& [field, col] : field_col) {
            (void)col;
            auto v = cell(row, field);
            if (!v || v->empty()) continue;
            if (field == "claim" || field == "title" || field == "full_text")
                rec.extras[field] = *v;
            else if (field.rfind("extras.", 0) == 0)
                rec.extras[field.substr(7)] = *v;
            else if (field.rfind("quality.", 0) == 0)
                rec.extras["quality:" + field.substr(8)] = *v;
        }
        detail::accept_or_reject(std::move(rec), out);
    }
    return out;
}

// ---- Front door ------------------------------------------------------------
// The adapter is keyed by dataset id: the two Microtext parts use the
// arggraph XML adapter, MAFALDA its JSONL adapter, and every other registered
// dataset goes through the generic tabular adapter with a user-supplied
// column manifest.
inline IngestResult ingest(const std::string& raw_path, const std::string& dataset_id,
                           const std::optional<CsvManifest>& manifest = std::nullopt) {
    if (!dataset_registered(dataset_id)) throw Error("unknown adapter: " + dataset_id);
    if (dataset_id == "microtext_p1" || dataset_id == "microtext_p2")
        return ingest_microtext_xml(raw_path, dataset_id);
    if (dataset_id == "mafalda") return ingest_mafalda_jsonl(raw_path, dataset_id);
    if (!manifest)
        throw Error("dataset '" + dataset_id + "' needs a column-mapping manifest");
    if (manifest->dataset_id != dataset_id)
        throw Error("manifest dataset_id '" + manifest->dataset_id + "' does not match '" +
                    dataset_id + "'");
    return ingest_csv(raw_path, *manifest);
}

}  // namespace amtk::adapters
