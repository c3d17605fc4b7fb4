#include "bookrag/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "bookrag/planner.hpp"

namespace bookrag {

std::string normalize_answer(const std::string& text) {
    std::string lowered;
    lowered.reserve(text.size());
    for (unsigned char c : text) {
        if (std::ispunct(c)) {
            lowered.push_back(' ');
        } else {
            lowered.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return collapse_whitespace(lowered);
}

int accuracy_inclusion(const std::string& gold, const std::string& raw, Warnings* warnings) {
    const std::string g = normalize_answer(gold);
    const std::string r = normalize_answer(raw);
    if (g.empty()) {
        warn(warnings, "accuracy: empty gold answer, trivially included");
        return 1;
    }
    return r.find(g) != std::string::npos ? 1 : 0;
}

int exact_match(const std::string& gold, const std::string& extracted) {
    return normalize_answer(gold) == normalize_answer(extracted) ? 1 : 0;
}

std::string extract_answer(const std::string& raw, ModelGateway& gateway,
                           const PromptLibrary& prompts) {
    const RenderedPrompt prompt = prompts.render("answer_extract", {{"raw", raw}}, raw);
    return gateway.complete(prompt);
}

double token_f1(const std::string& gold, const std::string& extracted) {
    const auto gold_tokens = tokenize(normalize_answer(gold));
    const auto pred_tokens = tokenize(normalize_answer(extracted));
    if (gold_tokens.empty() && pred_tokens.empty()) return 1.0;
    if (gold_tokens.empty() || pred_tokens.empty()) return 0.0;

    // bags: intersection counts min multiplicity per token
    std::map<std::string, std::size_t> gold_bag;
    for (const auto& t : gold_tokens) ++gold_bag[t];
    std::size_t overlap = 0;
    for (const auto& t : pred_tokens) {
        auto it = gold_bag.find(t);
        if (it != gold_bag.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / pred_tokens.size();
    const double recall = static_cast<double>(overlap) / gold_tokens.size();
    return 2.0 * precision * recall / (precision + recall);
}

double retrieval_recall(const std::set<std::string>& gold,
                        const std::set<std::string>& retrieved, bool parsing_error) {
    if (parsing_error) return 0.0;
    if (gold.empty()) throw EmptyGold("retrieval_recall: empty gold set");
    std::size_t hit = 0;
    for (const auto& id : gold) hit += retrieved.count(id);
    return static_cast<double>(hit) / static_cast<double>(gold.size());
}

std::vector<QaExample> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path.string());
    std::vector<QaExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        QaExample ex;
        if (!rec.contains("question") || !rec.contains("answer") || !rec.contains("doc_id"))
            throw MissingField("dataset line " + std::to_string(line_no) +
                               ": needs question, answer, doc_id");
        ex.question = rec["question"].get<std::string>();
        ex.gold_answer = rec["answer"].get<std::string>();
        ex.doc_id = rec["doc_id"].get<std::string>();
        if (rec.contains("evidence"))
            ex.gold_evidence = rec["evidence"].get<std::vector<std::string>>();
        if (rec.contains("parsing_error")) ex.parsing_error = rec["parsing_error"].get<bool>();
        out.push_back(std::move(ex));
    }
    if (out.empty()) throw EmptyDataset("dataset has no examples: " + path.string());
    return out;
}

namespace {

ExampleRecord evaluate_one(const QaExample& ex, const BookIndex& index,
                           ModelGateway& gateway, const PromptLibrary& prompts,
                           const EvalOptions& options) {
    ExampleRecord rec;
    rec.question = ex.question;
    rec.doc_id = ex.doc_id;

    const UsageSnapshot before = ModelGateway::thread_usage();
    const auto started = std::chrono::steady_clock::now();
    try {
        const QueryCategory category = classify(ex.question, gateway, prompts);
        const QueryPlan plan =
            make_plan(ex.question, category, gateway, prompts, options.planner);
        ExecOptions exec = options.exec;
        exec.prompts = &prompts;
        const ExecutionResult run = execute(plan, index, gateway, exec);

        rec.answer = run.answer;
        rec.accuracy = accuracy_inclusion(ex.gold_answer, run.answer);
        rec.extracted = extract_answer(run.answer, gateway, prompts);
        rec.em = exact_match(ex.gold_answer, rec.extracted);
        rec.f1 = token_f1(ex.gold_answer, rec.extracted);

        if (!ex.gold_evidence.empty() || ex.parsing_error) {
            std::set<std::string> gold(ex.gold_evidence.begin(), ex.gold_evidence.end());
            std::set<std::string> retrieved;
            for (const ScoredNode& n : run.retrieved.nodes) retrieved.insert(n.id);
            rec.recall = retrieval_recall(gold, retrieved, ex.parsing_error);
        }
    } catch (const Error& e) {
        rec.error = e.what();
    }
    const auto finished = std::chrono::steady_clock::now();
    rec.latency_ms = std::chrono::duration<double, std::milli>(finished - started).count();
    rec.tokens = ModelGateway::thread_usage().total_tokens() - before.total_tokens();
    return rec;
}

}  // namespace

EvalReport run_eval(const std::vector<QaExample>& dataset,
                    const std::map<std::string, const BookIndex*>& indexes,
                    ModelGateway& gateway, const PromptLibrary& prompts,
                    const EvalOptions& options) {
    if (dataset.empty()) throw EmptyDataset("run_eval: empty dataset");
    for (const QaExample& ex : dataset) {
        auto it = indexes.find(ex.doc_id);
        if (it == indexes.end() || it->second == nullptr)
            throw Error("run_eval: no index for doc_id '" + ex.doc_id + "'");
    }

    EvalReport report;
    report.records.resize(dataset.size());

    const int workers = std::max(1, options.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            report.records[i] = evaluate_one(dataset[i], *indexes.at(dataset[i].doc_id),
                                             gateway, prompts, options);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= dataset.size()) return;
                    report.records[i] = evaluate_one(
                        dataset[i], *indexes.at(dataset[i].doc_id), gateway, prompts, options);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return report;
}

EvalReport::Aggregates EvalReport::aggregates() const {
    Aggregates agg;
    if (records.empty()) return agg;
    double recall_sum = 0.0;
    std::size_t recall_count = 0;
    for (const ExampleRecord& r : records) {
        agg.em += r.em;
        agg.accuracy += r.accuracy;
        agg.f1 += r.f1;
        agg.total_tokens += r.tokens;
        agg.mean_latency_ms += r.latency_ms;
        if (r.recall) {
            recall_sum += *r.recall;
            ++recall_count;
        }
        if (!r.error.empty()) ++agg.failures;
    }
    const double n = static_cast<double>(records.size());
    agg.em /= n;
    agg.accuracy /= n;
    agg.f1 /= n;
    agg.mean_latency_ms /= n;
    if (recall_count > 0) agg.recall = recall_sum / static_cast<double>(recall_count);
    return agg;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json records_json = nlohmann::json::array();
    for (const ExampleRecord& r : records) {
        nlohmann::json j;
        j["question"] = r.question;
        j["doc_id"] = r.doc_id;
        j["answer"] = r.answer;
        j["extracted"] = r.extracted;
        j["em"] = r.em;
        j["accuracy"] = r.accuracy;
        j["f1"] = r.f1;
        if (r.recall) j["recall"] = *r.recall;
        j["tokens"] = r.tokens;
        j["latency_ms"] = r.latency_ms;
        if (!r.error.empty()) j["error"] = r.error;
        records_json.push_back(std::move(j));
    }
    const Aggregates agg = aggregates();
    nlohmann::json agg_json;
    agg_json["em"] = agg.em;
    agg_json["accuracy"] = agg.accuracy;
    agg_json["f1"] = agg.f1;
    if (agg.recall) agg_json["recall"] = *agg.recall;
    agg_json["total_tokens"] = agg.total_tokens;
    agg_json["mean_latency_ms"] = agg.mean_latency_ms;
    agg_json["failures"] = agg.failures;

    nlohmann::json out;
    out["records"] = std::move(records_json);
    out["aggregates"] = std::move(agg_json);
    return out;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport report;
    for (const auto& jr : j.at("records")) {
        ExampleRecord r;
        r.question = jr.at("question").get<std::string>();
        r.doc_id = jr.at("doc_id").get<std::string>();
        r.answer = jr.value("answer", "");
        r.extracted = jr.value("extracted", "");
        r.em = jr.at("em").get<int>();
        r.accuracy = jr.at("accuracy").get<int>();
        r.f1 = jr.at("f1").get<double>();
        if (jr.contains("recall")) r.recall = jr["recall"].get<double>();
        r.tokens = jr.at("tokens").get<std::uint64_t>();
        r.latency_ms = jr.at("latency_ms").get<double>();
        r.error = jr.value("error", "");
        report.records.push_back(std::move(r));
    }
    return report;
}

std::string EvalReport::to_table() const {
    const Aggregates agg = aggregates();
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    out << "  #  EM  Acc     F1  Recall   Tokens  Question\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ExampleRecord& r = records[i];
        out << std::setw(3) << i + 1 << "  " << r.em << "    " << r.accuracy << "  "
            << std::setw(5) << r.f1 << "  ";
        if (r.recall) {
            out << std::setw(6) << *r.recall;
        } else {
            out << "     -";
        }
        out << "  " << std::setw(7) << r.tokens << "  ";
        std::string q = collapse_whitespace(r.question);
        if (q.size() > 48) q = q.substr(0, 45) + "...";
        out << q;
        if (!r.error.empty()) out << "  [FAILED: " << r.error << "]";
        out << "\n";
    }
    out << "---\n";
    out << "mean EM " << agg.em << " | accuracy " << agg.accuracy << " | F1 " << agg.f1;
    if (agg.recall) out << " | recall " << *agg.recall;
    out << " | tokens " << agg.total_tokens << " | mean latency " << agg.mean_latency_ms
        << " ms";
    if (agg.failures > 0) out << " | failures " << agg.failures;
    out << "\n";
    return out.str();
}

}  // namespace bookrag
