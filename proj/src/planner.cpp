#include "bookrag/planner.hpp"

#include <algorithm>

#include "bookrag/operators.hpp"

namespace bookrag {

std::string category_name(QueryCategory c) {
    switch (c) {
        case QueryCategory::SingleHop: return "single-hop";
        case QueryCategory::MultiHop: return "multi-hop";
        case QueryCategory::Global: return "global";
    }
    return "single-hop";
}

std::string filter_type_name(FilterType t) {
    switch (t) {
        case FilterType::Section: return "section";
        case FilterType::Image: return "image";
        case FilterType::Table: return "table";
        case FilterType::Page: return "page";
    }
    return "section";
}

std::string aggregate_op_name(AggregateOp op) {
    switch (op) {
        case AggregateOp::Count: return "COUNT";
        case AggregateOp::List: return "LIST";
        case AggregateOp::Summarize: return "SUMMARIZE";
        case AggregateOp::Analyze: return "ANALYZE";
    }
    return "COUNT";
}

namespace {

std::optional<QueryCategory> category_from_string(std::string s) {
    s = to_lower(trim(s));
    std::replace(s.begin(), s.end(), '_', '-');
    // "simple"/"complex" are the classification prompt's own aliases
    if (s == "single-hop" || s == "singlehop" || s == "simple" || s == "single")
        return QueryCategory::SingleHop;
    if (s == "multi-hop" || s == "multihop" || s == "complex" || s == "multi")
        return QueryCategory::MultiHop;
    if (s == "global" || s == "global-aggregation") return QueryCategory::Global;
    return std::nullopt;
}

std::optional<QueryCategory> try_parse_category(const std::string& response) {
    const std::string payload = extract_json_payload(response);
    if (!payload.empty()) {
        try {
            const nlohmann::json doc = nlohmann::json::parse(payload);
            if (doc.is_object() && doc.contains("category") && doc["category"].is_string())
                return category_from_string(doc["category"].get<std::string>());
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
        return std::nullopt;
    }
    return category_from_string(response);
}

AggregateOp parse_operation(const std::string& s) {
    const std::string key = to_lower(trim(s));
    if (key == "count") return AggregateOp::Count;
    if (key == "list") return AggregateOp::List;
    if (key == "summarize") return AggregateOp::Summarize;
    if (key == "analyze") return AggregateOp::Analyze;
    throw MalformedVerdict("unknown aggregation operation: " + s);
}

FilterType parse_filter_type(const std::string& s) {
    const std::string key = to_lower(trim(s));
    if (key == "section") return FilterType::Section;
    if (key == "image") return FilterType::Image;
    if (key == "table") return FilterType::Table;
    if (key == "page") return FilterType::Page;
    throw MalformedVerdict("unknown filter_type: " + s);
}

}  // namespace

QueryCategory classify(const std::string& query, ModelGateway& gateway,
                       const PromptLibrary& prompts) {
    if (trim(query).empty()) throw Error("classify: empty query");
    const RenderedPrompt prompt = prompts.render("classify", {{"query", query}}, query);
    // one retry with the same prompt before giving up
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string response = gateway.complete(prompt);
        const auto category = try_parse_category(response);
        if (category) return *category;
    }
    throw MalformedVerdict("classification output unparsable for query: " + query);
}

std::pair<int, int> parse_page_range(const std::string& value) {
    const std::string v = trim(value);
    const auto all_digits = [](const std::string& s) {
        return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
    };
    const std::size_t dash = v.find('-');
    if (dash == std::string::npos) {
        if (!all_digits(v)) throw MalformedVerdict("page range must be 'a-b' or 'a': " + value);
        const int page = std::stoi(v);
        return {page, page};
    }
    const std::string lo = v.substr(0, dash);
    const std::string hi = v.substr(dash + 1);
    if (!all_digits(lo) || !all_digits(hi))
        throw MalformedVerdict("page range must be 'a-b' or 'a': " + value);
    return {std::stoi(lo), std::stoi(hi)};
}

std::vector<FilterSpec> parse_filter_spec(const std::string& model_output, Warnings* warnings) {
    nlohmann::json doc;
    try {
        const std::string payload = extract_json_payload(model_output);
        if (payload.empty()) throw MalformedVerdict("filter spec: no JSON in model output");
        doc = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedVerdict("filter spec: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("filters") || !doc["filters"].is_array())
        throw MalformedVerdict("filter spec: missing 'filters' list");
    if (!doc.contains("operation") || !doc["operation"].is_string())
        throw MalformedVerdict("filter spec: missing 'operation'");

    const AggregateOp operation = parse_operation(doc["operation"].get<std::string>());

    std::vector<FilterSpec> specs;
    for (const auto& jf : doc["filters"]) {
        if (!jf.is_object() || !jf.contains("filter_type"))
            throw MalformedVerdict("filter spec: filter without filter_type");
        FilterSpec spec;
        spec.filter_type = parse_filter_type(jf["filter_type"].get<std::string>());
        spec.operation = operation;
        if (jf.contains("filter_value") && !jf["filter_value"].is_null()) {
            if (!jf["filter_value"].is_string())
                throw MalformedVerdict("filter spec: filter_value must be a string or null");
            spec.filter_value = jf["filter_value"].get<std::string>();
        }
        if ((spec.filter_type == FilterType::Image || spec.filter_type == FilterType::Table) &&
            spec.filter_value) {
            warn(warnings, "filter spec: " + filter_type_name(spec.filter_type) +
                               " filter carries a value; corrected to null");
            spec.filter_value.reset();
        }
        if (spec.filter_type == FilterType::Page && spec.filter_value)
            parse_page_range(*spec.filter_value);  // form check only
        specs.push_back(std::move(spec));
    }
    if (specs.empty()) throw MalformedVerdict("filter spec: empty filter list");
    return specs;
}

namespace {

QueryPlan make_single_hop_plan(const std::string& query, const PlannerOptions& options) {
    QueryPlan plan;
    plan.category = QueryCategory::SingleHop;
    plan.query = query;
    plan.steps.push_back(OperatorCall{"Extract", {{"query", query}}, {}});
    plan.steps.push_back(OperatorCall{
        "Select_by_Entity",
        {{"depth", options.section_depth}, {"fallback", "Select_by_Section"}},
        {}});
    plan.steps.push_back(OperatorCall{"Graph_Reasoning", nlohmann::json::object(), {}});
    plan.steps.push_back(OperatorCall{"Text_Reasoning", {{"query", query}}, {}});
    plan.steps.push_back(
        OperatorCall{"Skyline_Ranker", {{"criteria", {"s_graph", "s_text"}}}, {}});
    plan.steps.push_back(OperatorCall{"Reduce", nlohmann::json::object(), {}});
    return plan;
}

}  // namespace

QueryPlan make_plan(const std::string& query, QueryCategory category, ModelGateway& gateway,
                    const PromptLibrary& prompts, const PlannerOptions& options,
                    Warnings* warnings) {
    QueryPlan plan;
    plan.query = query;
    plan.category = category;

    switch (category) {
        case QueryCategory::SingleHop: {
            plan = make_single_hop_plan(query, options);
            break;
        }
        case QueryCategory::MultiHop: {
            const auto sub_questions = decompose(query, gateway, prompts);
            nlohmann::json bound = nlohmann::json::array();
            std::vector<std::string> synthesis;
            std::vector<QueryPlan> sub_plans;
            for (const auto& [text, kind] : sub_questions) {
                bound.push_back(
                    {{"question", text},
                     {"type", kind == SubQuestionKind::Retrieval ? "retrieval" : "synthesis"}});
                if (kind == SubQuestionKind::Retrieval) {
                    sub_plans.push_back(make_single_hop_plan(text, options));
                } else {
                    synthesis.push_back(text);
                }
            }
            if (sub_plans.empty())
                throw PlanValidationError(
                    "decomposition produced no retrieval sub-questions for: " + query);
            plan.provenance = bound.dump();
            plan.steps.push_back(OperatorCall{"Decompose", {{"sub_questions", bound}}, {}});
            for (auto& sp : sub_plans) {
                OperatorCall call{"Sub_Plan", {{"question", sp.query}}, {}};
                call.sub_plans.push_back(std::move(sp));
                plan.steps.push_back(std::move(call));
            }
            plan.steps.push_back(OperatorCall{"Map", nlohmann::json::object(), {}});
            plan.steps.push_back(
                OperatorCall{"Reduce", {{"synthesis_instructions", synthesis}}, {}});
            break;
        }
        case QueryCategory::Global: {
            const RenderedPrompt prompt =
                prompts.render("filter_spec", {{"query", query}}, query);
            const std::string response = gateway.complete(prompt);
            plan.provenance = response;
            const auto specs = parse_filter_spec(response, warnings);
            const AggregateOp operation = specs.front().operation;
            for (const FilterSpec& spec : specs) {
                switch (spec.filter_type) {
                    case FilterType::Page: {
                        nlohmann::json params{{"filter_type", "page"}};
                        if (spec.filter_value) params["range"] = *spec.filter_value;
                        plan.steps.push_back(OperatorCall{"Filter_Range", params, {}});
                        break;
                    }
                    case FilterType::Section:
                        if (spec.filter_value) {
                            plan.steps.push_back(OperatorCall{
                                "Filter_Range",
                                {{"filter_type", "section"}, {"section", *spec.filter_value}},
                                {}});
                        } else {
                            plan.steps.push_back(OperatorCall{
                                "Filter_Modal", {{"modal_type", "Section"}}, {}});
                        }
                        break;
                    case FilterType::Image:
                        plan.steps.push_back(
                            OperatorCall{"Filter_Modal", {{"modal_type", "Image"}}, {}});
                        break;
                    case FilterType::Table:
                        plan.steps.push_back(
                            OperatorCall{"Filter_Modal", {{"modal_type", "Table"}}, {}});
                        break;
                }
            }
            plan.steps.push_back(OperatorCall{"Map", nlohmann::json::object(), {}});
            plan.steps.push_back(
                OperatorCall{"Reduce", {{"operation", aggregate_op_name(operation)}}, {}});
            break;
        }
    }

    validate_plan(plan);
    return plan;
}

namespace {

void expect(bool condition, const std::string& message) {
    if (!condition) throw PlanValidationError(message);
}

void validate_single_hop(const QueryPlan& plan) {
    expect(plan.steps.size() == 6, "single-hop plan must have exactly 6 steps");
    expect(plan.steps[0].op == "Extract", "single-hop step 1 must be Extract");
    expect(plan.steps[1].op == "Select_by_Entity" || plan.steps[1].op == "Select_by_Section",
           "single-hop step 2 must be a Selector");
    expect(plan.steps[2].op == "Graph_Reasoning", "single-hop step 3 must be Graph_Reasoning");
    expect(plan.steps[3].op == "Text_Reasoning", "single-hop step 4 must be Text_Reasoning");
    expect(plan.steps[4].op == "Skyline_Ranker", "single-hop step 5 must be Skyline_Ranker");
    expect(plan.steps[5].op == "Reduce", "single-hop step 6 must be Reduce");
    for (const auto& step : plan.steps)
        expect(step.sub_plans.empty(), "single-hop steps cannot embed sub-plans");
}

}  // namespace

void validate_plan(const QueryPlan& plan) {
    switch (plan.category) {
        case QueryCategory::SingleHop:
            validate_single_hop(plan);
            return;
        case QueryCategory::MultiHop: {
            expect(plan.steps.size() >= 4, "multi-hop plan needs Decompose, sub-plans, Map, Reduce");
            expect(plan.steps.front().op == "Decompose", "multi-hop step 1 must be Decompose");
            expect(plan.steps[plan.steps.size() - 2].op == "Map",
                   "multi-hop penultimate step must be Map");
            expect(plan.steps.back().op == "Reduce", "multi-hop last step must be Reduce");
            std::size_t sub_count = 0;
            for (std::size_t i = 1; i + 2 < plan.steps.size(); ++i) {
                const OperatorCall& step = plan.steps[i];
                expect(step.op == "Sub_Plan", "multi-hop middle steps must be Sub_Plan");
                expect(step.sub_plans.size() == 1, "Sub_Plan must embed exactly one plan");
                expect(step.sub_plans.front().category == QueryCategory::SingleHop,
                       "embedded sub-plan must be single-hop");
                validate_single_hop(step.sub_plans.front());
                ++sub_count;
            }
            expect(sub_count >= 1, "multi-hop plan needs at least one retrieval sub-plan");
            return;
        }
        case QueryCategory::Global: {
            expect(plan.steps.size() >= 3, "global plan needs filters, Map, Reduce");
            expect(plan.steps[plan.steps.size() - 2].op == "Map",
                   "global penultimate step must be Map");
            expect(plan.steps.back().op == "Reduce", "global last step must be Reduce");
            expect(plan.steps.back().params.contains("operation"),
                   "global Reduce must bind an operation");
            const std::string op = plan.steps.back().params["operation"].get<std::string>();
            expect(op == "COUNT" || op == "LIST" || op == "SUMMARIZE" || op == "ANALYZE",
                   "global Reduce operation invalid: " + op);
            for (std::size_t i = 0; i + 2 < plan.steps.size(); ++i) {
                const OperatorCall& step = plan.steps[i];
                expect(step.op == "Filter_Modal" || step.op == "Filter_Range",
                       "global steps before Map must be filters");
                if (step.op == "Filter_Modal") {
                    expect(step.params.contains("modal_type"),
                           "Filter_Modal must bind modal_type");
                } else if (step.params.contains("range")) {
                    parse_page_range(step.params["range"].get<std::string>());
                } else {
                    expect(step.params.contains("section"),
                           "Filter_Range must bind a page range or section");
                }
            }
            expect(plan.steps.size() - 2 >= 1, "global plan needs at least one filter");
            return;
        }
    }
    throw PlanValidationError("unknown plan category");
}

nlohmann::json QueryPlan::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const OperatorCall& step : steps) {
        nlohmann::json j;
        j["op"] = step.op;
        j["params"] = step.params;
        if (!step.sub_plans.empty()) {
            nlohmann::json subs = nlohmann::json::array();
            for (const QueryPlan& sp : step.sub_plans) subs.push_back(sp.to_json());
            j["sub_plans"] = std::move(subs);
        }
        steps_json.push_back(std::move(j));
    }
    nlohmann::json out;
    out["category"] = category_name(category);
    out["query"] = query;
    out["steps"] = std::move(steps_json);
    if (!provenance.empty()) out["provenance"] = provenance;
    return out;
}

}  // namespace bookrag
