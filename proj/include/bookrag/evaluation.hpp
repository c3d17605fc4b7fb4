#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bookrag/book_index.hpp"
#include "bookrag/gateway.hpp"
#include "bookrag/operators.hpp"
#include "bookrag/prompts.hpp"

namespace bookrag {

// ---- metrics ---------------------------------------------------------------

// lowercase, punctuation stripped, whitespace collapsed
std::string normalize_answer(const std::string& text);

// 1 iff the normalized gold answer is a substring of the normalized raw
// response. Empty gold trivially includes; reported as a warning.
int accuracy_inclusion(const std::string& gold, const std::string& raw,
                       Warnings* warnings = nullptr);

// strict equality of normalized strings
int exact_match(const std::string& gold, const std::string& extracted);

// model-based answer-span extraction from a free-form response
std::string extract_answer(const std::string& raw, ModelGateway& gateway,
                           const PromptLibrary& prompts);

// bag-of-tokens F1; both empty -> 1, exactly one empty -> 0
double token_f1(const std::string& gold, const std::string& extracted);

// |retrieved intersect gold| / |gold| over unique ids; 0 when the gold
// evidence was lost to a parsing error. Throws EmptyGold when gold is empty
// without the parsing_error flag.
double retrieval_recall(const std::set<std::string>& gold,
                        const std::set<std::string>& retrieved, bool parsing_error);

// ---- harness ---------------------------------------------------------------

struct QaExample {
    std::string question;
    std::string gold_answer;
    std::vector<std::string> gold_evidence;  // block ids; optional
    std::string doc_id;
    bool parsing_error = false;
};

// JSONL: one {"question","answer","evidence"?,"doc_id","parsing_error"?}
// record per line.
std::vector<QaExample> load_dataset(const std::filesystem::path& path);

struct ExampleRecord {
    std::string question;
    std::string doc_id;
    std::string answer;
    std::string extracted;
    int em = 0;
    int accuracy = 0;
    double f1 = 0.0;
    std::optional<double> recall;
    std::uint64_t tokens = 0;
    double latency_ms = 0.0;
    std::string error;  // non-empty when the example failed
};

struct EvalReport {
    std::vector<ExampleRecord> records;

    struct Aggregates {
        double em = 0.0;
        double accuracy = 0.0;
        double f1 = 0.0;
        std::optional<double> recall;
        std::uint64_t total_tokens = 0;
        double mean_latency_ms = 0.0;
        std::size_t failures = 0;
    };
    // always recomputed from the records
    Aggregates aggregates() const;

    nlohmann::json to_json() const;
    std::string to_table() const;
    static EvalReport from_json(const nlohmann::json& j);
};

struct EvalOptions {
    PlannerOptions planner;
    ExecOptions exec;
    int workers = 1;
};

// Answers every example via classify -> make_plan -> execute and scores it.
// Per-example failures are recorded and the run continues.
EvalReport run_eval(const std::vector<QaExample>& dataset,
                    const std::map<std::string, const BookIndex*>& indexes,
                    ModelGateway& gateway, const PromptLibrary& prompts,
                    const EvalOptions& options = {});

}  // namespace bookrag
