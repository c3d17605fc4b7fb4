#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bookrag/gateway.hpp"
#include "bookrag/prompts.hpp"

namespace bookrag {

enum class QueryCategory { SingleHop, MultiHop, Global };

std::string category_name(QueryCategory c);

enum class FilterType { Section, Image, Table, Page };
enum class AggregateOp { Count, List, Summarize, Analyze };

std::string filter_type_name(FilterType t);
std::string aggregate_op_name(AggregateOp op);

struct FilterSpec {
    FilterType filter_type = FilterType::Section;
    std::optional<std::string> filter_value;  // must stay empty for image/table
    AggregateOp operation = AggregateOp::Count;
};

struct QueryPlan;

struct OperatorCall {
    std::string op;
    nlohmann::json params = nlohmann::json::object();
    std::vector<QueryPlan> sub_plans;  // one embedded plan per Sub_Plan step
};

struct QueryPlan {
    QueryCategory category = QueryCategory::SingleHop;
    std::string query;
    std::vector<OperatorCall> steps;
    std::string provenance;  // raw planner model output, for audit

    nlohmann::json to_json() const;
};

struct PlannerOptions {
    int section_depth = 1;
};

// Category via the classification prompt; retries once on malformed output.
QueryCategory classify(const std::string& query, ModelGateway& gateway,
                       const PromptLibrary& prompts);

// Instantiates the category's operator template with bound parameters.
// MultiHop runs decomposition here so sub-plans are embedded; Global runs
// filter-spec generation. The result always re-validates (validate_plan).
QueryPlan make_plan(const std::string& query, QueryCategory category, ModelGateway& gateway,
                    const PromptLibrary& prompts, const PlannerOptions& options = {},
                    Warnings* warnings = nullptr);

// Parses and validates the filter-spec JSON a model produced for a Global
// query. image/table filters with a non-null value are corrected to null
// with a warning; unknown enum values are MalformedVerdict.
std::vector<FilterSpec> parse_filter_spec(const std::string& model_output,
                                          Warnings* warnings = nullptr);

// "a-b" or "a" only; anything else throws MalformedVerdict.
std::pair<int, int> parse_page_range(const std::string& value);

// Checks the plan against its category's template grammar; throws
// PlanValidationError on the first violation.
void validate_plan(const QueryPlan& plan);

}  // namespace bookrag
