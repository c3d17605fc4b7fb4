#include "bookrag/mock_gateway.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bookrag {

namespace {

std::string script_key(const std::string& template_name, const std::string& salient) {
    return template_name + ":" + salient;
}

std::set<std::string> token_set(const std::string& s) {
    auto tokens = tokenize(s);
    return {tokens.begin(), tokens.end()};
}

// Up to `limit` distinct words of >= 4 characters, document order.
std::vector<std::string> salient_words(const std::string& text, std::size_t limit) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& tok : tokenize(text)) {
        if (tok.size() < 4) continue;
        if (!seen.insert(tok).second) continue;
        out.push_back(tok);
        if (out.size() >= limit) break;
    }
    return out;
}

std::string snippet(const std::string& text, std::size_t limit = 80) {
    std::string s = collapse_whitespace(text);
    if (s.size() > limit) s = s.substr(0, limit);
    return s;
}

}  // namespace

MockGateway::MockGateway(Mode mode, std::size_t dim) : mode_(mode), dim_(dim) {
    retry_.backoff_ms = 0;  // no real transport behind the mock
}

void MockGateway::script(const std::string& template_name, const std::string& salient,
                         const std::string& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    scripts_[script_key(template_name, salient)] = response;
}

void MockGateway::fail_times(const std::string& template_name, const std::string& salient,
                             int times) {
    std::lock_guard<std::mutex> lock(mutex_);
    failures_[script_key(template_name, salient)] = times;
}

void MockGateway::set_embedding(const std::string& text, std::vector<double> embedding) {
    if (embedding.size() != dim_)
        throw DimensionMismatch("pinned embedding has wrong dimension");
    std::lock_guard<std::mutex> lock(mutex_);
    pinned_embeddings_[text] = std::move(embedding);
}

void MockGateway::load_script_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("mock script file: " + std::string(e.what()));
    }
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        scripts_[it.key()] = it.value().get<std::string>();
    }
}

std::map<std::string, std::string> MockGateway::script_table() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return scripts_;
}

std::string MockGateway::lookup(const RenderedPrompt& prompt) {
    const std::string key = script_key(prompt.template_name, prompt.salient);
    for (int attempt = 1;; ++attempt) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto fail = failures_.find(key);
            if (fail != failures_.end() && fail->second > 0) {
                --fail->second;
                if (attempt >= retry_.attempts)
                    throw GatewayError("mock backend failed after " +
                                       std::to_string(attempt) + " attempts: " + key);
                continue;
            }
            auto it = scripts_.find(key);
            if (it != scripts_.end()) return it->second;
        }
        break;
    }
    if (mode_ == Mode::Strict)
        throw GatewayError("no scripted response for key '" + key + "'");
    return heuristic_response(prompt);
}

std::string MockGateway::complete(const RenderedPrompt& prompt) {
    std::string response = lookup(prompt);
    record_usage(approx_token_count(prompt.text), approx_token_count(response));
    return response;
}

std::string MockGateway::complete_vision(const RenderedPrompt& prompt,
                                         const std::vector<unsigned char>& image) {
    (void)image;  // mock purity: bytes never influence the response
    std::string response = lookup(prompt);
    record_usage(approx_token_count(prompt.text) + 1, approx_token_count(response));
    return response;
}

std::vector<double> MockGateway::embed(const std::string& text) {
    if (text.empty()) throw GatewayError("embed: empty input text");
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = pinned_embeddings_.find(text);
        if (it != pinned_embeddings_.end()) {
            record_usage(approx_token_count(text), 0);
            return it->second;
        }
    }
    std::vector<double> v(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
        const std::uint64_t h = fnv1a64(tok);
        const std::size_t index = static_cast<std::size_t>(h % dim_);
        const double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
        v[index] += sign;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    } else {
        v[0] = 1.0;  // tokens hashed to perfect cancellation; keep a unit vector
    }
    record_usage(approx_token_count(text), 0);
    return v;
}

std::vector<double> MockGateway::rerank(const std::string& query,
                                        const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw GatewayError("rerank: no candidates");
    std::vector<double> scores;
    scores.reserve(candidates.size());
    std::uint64_t cand_tokens = 0;
    for (const auto& c : candidates) {
        scores.push_back(jaccard(query, c));
        cand_tokens += approx_token_count(c);
    }
    record_usage(approx_token_count(query) + cand_tokens, 0);
    return scores;
}

double MockGateway::jaccard(const std::string& a, const std::string& b) {
    const auto sa = token_set(a);
    const auto sb = token_set(b);
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// Heuristic fallbacks. Rule-based and deterministic; they make unscripted
// pipeline runs possible but carry no quality claim.
// ---------------------------------------------------------------------------

namespace {

std::string heuristic_classify(const std::string& query) {
    const std::string q = to_lower(query);
    const bool global = q.find("how many") != std::string::npos ||
                        q.find("list all") != std::string::npos ||
                        q.find("count") != std::string::npos ||
                        q.find("summarize the") != std::string::npos;
    const bool multi = q.find("difference") != std::string::npos ||
                       q.find("compare") != std::string::npos ||
                       q.find("greater") != std::string::npos ||
                       q.find("which one") != std::string::npos;
    nlohmann::json out;
    out["category"] = global ? "global" : (multi ? "multi-hop" : "single-hop");
    return out.dump();
}

std::string heuristic_filter_spec(const std::string& query) {
    const std::string q = to_lower(query);
    nlohmann::json filters = nlohmann::json::array();

    // "page 3 to 10", "pages 3-10", "first 10 pages"
    auto digits_at = [&](std::size_t pos, long long& value, std::size_t& end) {
        if (pos >= q.size() || !std::isdigit(static_cast<unsigned char>(q[pos]))) return false;
        value = 0;
        while (pos < q.size() && std::isdigit(static_cast<unsigned char>(q[pos]))) {
            value = value * 10 + (q[pos] - '0');
            ++pos;
        }
        end = pos;
        return true;
    };
    std::size_t p = q.find("first ");
    long long lo = 0, hi = 0;
    std::size_t end = 0;
    if (p != std::string::npos && digits_at(p + 6, hi, end) &&
        q.find("page", end) != std::string::npos) {
        filters.push_back({{"filter_type", "page"}, {"filter_value", "1-" + std::to_string(hi)}});
    } else if ((p = q.find("page")) != std::string::npos) {
        std::size_t i = p;
        while (i < q.size() && !std::isdigit(static_cast<unsigned char>(q[i]))) ++i;
        if (digits_at(i, lo, end)) {
            std::size_t j = end;
            while (j < q.size() &&
                   (q[j] == ' ' || q[j] == '-' || q.compare(j, 3, "to ") == 0))
                j += (q.compare(j, 3, "to ") == 0) ? 3 : 1;
            if (digits_at(j, hi, end)) {
                filters.push_back({{"filter_type", "page"},
                                   {"filter_value", std::to_string(lo) + "-" + std::to_string(hi)}});
            } else {
                filters.push_back({{"filter_type", "page"}, {"filter_value", std::to_string(lo)}});
            }
        }
    }
    if (q.find("figure") != std::string::npos || q.find("image") != std::string::npos ||
        q.find("chart") != std::string::npos || q.find("picture") != std::string::npos ||
        q.find("plot") != std::string::npos) {
        filters.push_back({{"filter_type", "image"}});
    } else if (q.find("table") != std::string::npos) {
        filters.push_back({{"filter_type", "table"}});
    } else if (q.find("chapter") != std::string::npos || q.find("section") != std::string::npos) {
        filters.push_back({{"filter_type", "section"}});
    }
    if (filters.empty()) filters.push_back({{"filter_type", "section"}});

    std::string op = "SUMMARIZE";
    if (q.find("how many") != std::string::npos || q.find("count") != std::string::npos)
        op = "COUNT";
    else if (q.find("list") != std::string::npos)
        op = "LIST";
    else if (q.find("analyze") != std::string::npos || q.find("analysis") != std::string::npos)
        op = "ANALYZE";

    nlohmann::json out;
    out["filters"] = filters;
    out["operation"] = op;
    return out.dump();
}

std::string heuristic_section_filter(const std::string& candidates) {
    // Candidate lines look like: block_id=<id> font_size=<fs> page=<p> text="..."
    nlohmann::json verdicts = nlohmann::json::array();
    std::istringstream in(candidates);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t id_pos = line.find("block_id=");
        if (id_pos == std::string::npos) continue;
        std::size_t id_end = line.find(' ', id_pos);
        if (id_end == std::string::npos) id_end = line.size();
        const std::string id = line.substr(id_pos + 9, id_end - id_pos - 9);
        double fs = 0.0;
        const std::size_t fs_pos = line.find("font_size=");
        if (fs_pos != std::string::npos) fs = std::strtod(line.c_str() + fs_pos + 10, nullptr);
        int level = fs >= 16.0 ? 1 : (fs >= 12.0 || fs == 0.0 ? 2 : 3);
        verdicts.push_back({{"block_id", id}, {"level", level}, {"type", "Section"}});
    }
    nlohmann::json out;
    out["verdicts"] = verdicts;
    return out.dump();
}

std::string heuristic_extract(const RenderedPrompt& prompt) {
    const std::string content =
        prompt.slots.count("content") ? prompt.slots.at("content") : "";
    const std::string node_id =
        prompt.slots.count("node_id") ? prompt.slots.at("node_id") : "node";
    nlohmann::json entities = nlohmann::json::array();
    nlohmann::json relations = nlohmann::json::array();

    std::string primary;
    std::string primary_type;
    if (prompt.template_name == "extract_table") {
        primary = "table " + node_id;
        primary_type = "TABLE";
    } else if (prompt.template_name == "extract_formula") {
        primary = "formula " + node_id;
        primary_type = "FORMULA";
    } else if (prompt.template_name == "extract_vision") {
        primary = "figure " + node_id;
        primary_type = "IMAGE";
    }
    // descriptions must differ per entity here: identical strings would make
    // every extracted entity a near-duplicate in rerank space and resolution
    // would collapse whole nodes into one blob
    if (!primary.empty()) {
        entities.push_back(
            {{"name", primary}, {"type", primary_type}, {"description", primary}});
    }
    for (const auto& word : salient_words(content, 5)) {
        entities.push_back({{"name", word}, {"type", "CONCEPT"}, {"description", word}});
        if (!primary.empty()) {
            relations.push_back({{"source", word},
                                 {"target", primary},
                                 {"description", "appears in " + primary},
                                 {"kind", "ContainedIn"}});
        }
    }
    nlohmann::json out;
    out["entities"] = entities;
    out["relations"] = relations;
    return out.dump();
}

std::string heuristic_adjudicate(const RenderedPrompt& prompt) {
    // Candidate lines are rendered as: <id>: <name> (<type>): <description>
    const std::string new_entity =
        prompt.slots.count("new_entity") ? prompt.slots.at("new_entity") : "";
    std::string new_name = new_entity;
    const std::size_t paren = new_name.find(" (");
    if (paren != std::string::npos) new_name = new_name.substr(0, paren);
    const std::string target = normalize_name(new_name);

    int select = -1;
    const std::string candidates =
        prompt.slots.count("candidates") ? prompt.slots.at("candidates") : "";
    std::istringstream in(candidates);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string rest = line.substr(colon + 1);
        const std::size_t p = rest.find(" (");
        if (p != std::string::npos) rest = rest.substr(0, p);
        if (normalize_name(rest) == target) {
            select = std::atoi(line.substr(0, colon).c_str());
            break;
        }
    }
    nlohmann::json out;
    out["select_id"] = select;
    out["explanation"] = select >= 0 ? "exact name match" : "no exact name match";
    return out.dump();
}

std::string heuristic_select_section(const std::string& query, const std::string& candidates) {
    // Pick the candidate sharing the most tokens with the query; first wins ties.
    std::istringstream in(candidates);
    std::string line, best;
    double best_score = -1.0;
    while (std::getline(in, line)) {
        std::string title = trim(line);
        if (title.rfind("- ", 0) == 0) title = title.substr(2);
        if (title.empty()) continue;
        const double score = MockGateway::jaccard(query, title);
        if (score > best_score) {
            best_score = score;
            best = title;
        }
    }
    nlohmann::json out;
    out["sections"] = nlohmann::json::array({best});
    return out.dump();
}

}  // namespace

std::string MockGateway::heuristic_response(const RenderedPrompt& prompt) const {
    const auto slot = [&](const char* name) -> std::string {
        auto it = prompt.slots.find(name);
        return it == prompt.slots.end() ? std::string() : it->second;
    };
    const std::string& t = prompt.template_name;
    if (t == "classify") return heuristic_classify(slot("query"));
    if (t == "decompose") {
        nlohmann::json out;
        out["sub_questions"] =
            nlohmann::json::array({{{"question", slot("query")}, {"type", "retrieval"}}});
        return out.dump();
    }
    if (t == "filter_spec") return heuristic_filter_spec(slot("query"));
    if (t == "section_filter") return heuristic_section_filter(slot("candidates"));
    if (t == "query_extract") {
        nlohmann::json entities = nlohmann::json::array();
        for (const auto& word : salient_words(slot("query"), 2))
            entities.push_back({{"entity_name", word}, {"entity_type", "CONCEPT"}});
        return nlohmann::json{{"entities", entities}}.dump();
    }
    if (t == "extract_text" || t == "extract_table" || t == "extract_formula" ||
        t == "extract_vision")
        return heuristic_extract(prompt);
    if (t == "er_adjudicate") return heuristic_adjudicate(prompt);
    if (t == "select_section") return heuristic_select_section(slot("query"), slot("candidates"));
    if (t == "map")
        return "From the evidence for '" + slot("question") + "': " +
               snippet(slot("evidence"), 200);
    if (t == "reduce") return "Synthesis for '" + slot("query") + "': " + snippet(slot("parts"), 400);
    if (t == "answer_extract") return trim(slot("raw"));
    return "OK";
}

}  // namespace bookrag
