#include "bookrag/prompts.hpp"

#include <fstream>
#include <sstream>

namespace bookrag {

namespace {

constexpr const char* kClassify = R"(You are an expert query analyzer. Your only task is to classify the user's question into one of three categories: "single-hop", "multi-hop", or "global". Respond only with the specified JSON object.

Category Definitions:
1.  single-hop: The question can be fully answered by retrieving information from a SINGLE, contiguous location in the document (e.g., one specific paragraph, one complete table, or one figure).
    - This includes questions that require reasoning or comparison, as long as all the necessary data is present within that single retrieved location.
    - Example: "What is the title of Figure 2?"

2.  multi-hop: The question requires decomposition into multiple simple sub-questions, where each sub-question must be answered by a separate retrieval action.
    - It often contains a nested or indirect constraint that requires a preliminary step to resolve before the main question can be answered.
    - Example: "What is the color of the personality vector...?" -> This is COMPLEX because it requires two separate retrieval actions.

3.  global: The question requires an aggregation operation (e.g., counting, listing, summarizing) over a set of items that are identified by a clear structural filter.
    - Example: "How many tables are in the document?" -> This is GLOBAL because the process is to filter for all items of type 'table'.

Respond with a single JSON object: {"category": "single-hop" | "multi-hop" | "global"}

User Query: {query}
)";

constexpr const char* kDecompose = R"(You are a query decomposition expert. You have been given a "complex" question. Your task is to break it down into a series of simple, atomic sub-questions and classify each one by type.

**Crucial Instructions:**
1.  Each `retrieval` sub-question MUST be a direct information retrieval task that can be answered independently by looking up a specific fact, number, or value in the document.
2.  **`retrieval` sub-questions MUST NOT depend on the answer of another sub-question.** They should be parallelizable. All logic for combining their results must be placed in a final `synthesis` question.
3.  A `synthesis` question requires comparing, calculating, or combining the answers of the previous `retrieval` questions. It does **NOT** require a new lookup in the document.

You MUST provide your response in a JSON object with a single key 'sub_questions', which contains a list of objects. Each object must have a 'question' (string) and a 'type' (string: "retrieval" or "synthesis").

--- EXAMPLE 1 (Correct Decomposition with Independent Lookups) ---
Complex Query: "What is the color of the personality vector in the soft-labled personality embedding matrix that with the highest Receptiviti score for User A2GBIFL43U1LKJ?"

Expected JSON Output:
{
  "sub_questions": [
    {"question": "What are all the Receptiviti scores for each personality vector for User A2GBIFL43U1LKJ?",
      "type": "retrieval"},
    {"question": "What is the mapping of personality vectors to their colors in the soft-labled personality embedding matrix?",
      "type": "retrieval"},
    {"question": "From the gathered scores, identify the personality vector with the highest score, and then find its corresponding color from the vector-to-color mapping.",
      "type": "synthesis"}
  ]
}
--- END EXAMPLE 1 ---

--- EXAMPLE 2 (Decomposition with retrieval and synthesis steps) ---
Complex Query: "According to the report, which one is greater in population in the survey? Foreign born Latinos, or the Latinos interviewed by cellphone?"

Expected JSON Output:
{
  "sub_questions": [
    {"question": "According to the report, what is the population of foreign born Latinos in the survey?",
      "type": "retrieval"},
    {"question": "According to the report, what is the population of Latinos interviewed by cellphone in the survey?",
      "type": "retrieval"},
    {"question": "Which of the two population counts is greater?",
      "type": "synthesis"}
  ]
}
--- END EXAMPLE 2 ---

Now, perform the decomposition for the following query.

User Query: {query}
)";

constexpr const char* kFilterSpec = R"(You are a highly specialized AI assistant. Your only function is to analyze a "Global Query" and return a single, valid JSON object that specifies both the filtering steps and the final aggregation operation. You MUST NOT output any other text or explanation.

### INSTRUCTIONS & DEFINITIONS ###

1.  **Filters**: You MUST determine the list of `filters` to apply. Even if the filter is for the whole document (e.g., all tables), the `filters` list must be present.
    - `filter_type`: One of ["section", "image", "table", "page"].
        - `section`: Use for structural parts like chapters, sections, appendices, or references.
        - `image`: Use for visual elements like figures, images, pictures, or plots.
        - `table`: Use for tabular data.
        - `page`: Use for specific page numbers or ranges.
    - `filter_value`: (Optional) Can be provided for "section" (e.g., a section title) or "page" (e.g., '3-10' or '5'). **For "image" or "table", this value MUST be null.**

2.  **Operation**: Determine the final aggregation operation.
    - `operation`: One of ["COUNT", "LIST", "SUMMARIZE", "ANALYZE"].

### EXAMPLES OF YOUR TASK ###

User: "How many figures are in this paper from Page 3 to Page 10?"
Assistant: {"filters": [{"filter_type": "page", "filter_value": "3-10"}, {"filter_type": "image"}], "operation": "COUNT"}

User: "Summarize the discussion about 'data augmentation' in the 'Methodology' section."
Assistant: {"filters": [{"filter_type": "section", "filter_value": "Methodology"}], "operation": "SUMMARIZE"}

User: "How many chapters are in this report?"
Assistant: {"filters": [{"filter_type": "section"}], "operation": "COUNT"}

### YOUR CURRENT TASK ###

User Query: {query}
)";

constexpr const char* kErAdjudicate = R"(-Goal-
You are an expert Entity Resolution Adjudicator. Your task is to determine if a "New Entity" refers to the exact same real-world concept as one of the "Candidate Entities" provided from a knowledge graph. Your output must be a JSON object containing the ID of the matching candidate (or -1) and a brief explanation for your decision.
-Context-
You will be given one "New Entity" recently extracted from a text. You will also be given a list of "Candidate Entities" that are semantically similar, retrieved from an existing knowledge base. Each candidate has a unique `id` for you to reference.
---
-Core Task & Rules-
1.  **Analyze the "New Entity"**: Carefully read its name, type, and description to understand what it is.
2.  **Field-by-Field Adjudication**: To determine a match, you must evaluate each field with a specific focus:
    * **`entity_name` (High Importance):** The names must be extremely similar, a direct abbreviation (e.g., "LLM" vs. "Large Language Model"), or a well-known alias. **If the names represent distinct, parallel concepts (like "Event Detection" and "Named Entity Recognition"), they are NOT a match, even if their descriptions are very similar.**
    * **`entity_type` (Medium Importance):** The types do not need to be identical, but they must be closely related and compatible (e.g., `COMPANY` and `ORGANIZATION` could describe the same entity).
    * **`description` (Contextual Importance):** The descriptions may differ as they are often extracted from different parts of a document. Your task is to look past surface-level text similarity and determine if they fundamentally describe the **same underlying object or concept**.

3.  **Be Strict and Conservative**: Your standard for a match must be very high. An incorrect merge can corrupt the knowledge graph. A missed merge is less harmful.
    * Surface-level similarities are not enough. The underlying concepts must be identical.
    * For example, "Apple" (the fruit) and "Apple Inc." (the company) are NOT a match.
    * **When in doubt, you MUST output -1.**
    * **Assume No Match by Default**: In a large knowledge graph, most new entities are genuinely new. You should start with the assumption that the "New Entity" is unique. You must find **strong, convincing evidence** across all fields, especially the `entity_name`, to overturn this assumption and declare a match.

4.  **Format the Output**: **You must provide your answer in a valid JSON format. The JSON object should contain two keys:**
    * `select_id`: An integer. The `id` of the candidate you've determined to be an exact match. If no exact match is found, this value MUST be `-1`.
    * `explanation`: A brief, one-sentence string explaining your reasoning. For a match, explain why they are the same entity. For no match, explain the key difference.
---
-Output Schema & Format-
Your response MUST be a single, valid JSON object that adheres to the following schema. Do not include any other text, explanation, or markdown formatting like ```json.

{
  "select_id": "integer",
  "explanation": "string"
}
---
-Task Execution-

Now, perform the selection task based on the following data.

- Input Data -
New Entity:
{new_entity}

Candidate Entities:
{candidates}
)";

constexpr const char* kSectionFilter = R"(You are analyzing candidate section headings that a layout parser tagged as titles. Some are genuine headings of the document outline; others were mis-tagged (for example, bold text inside a figure or a borderless table header).

High-level sections resolved so far:
{context}

For each candidate below, decide whether it is a genuine section heading. If it is, assign its hierarchical level (1 = top-level chapter, 2 = subsection, and so on), judging from its text, font size, and the outline so far. If it is not a heading, set level to null and type to "Text".

Candidates:
{candidates}

Respond with a single JSON object:
{"verdicts": [{"block_id": "<id>", "level": <integer or null>, "type": "Section" | "Text"}]}
)";

constexpr const char* kExtractText = R"(Extract the entities and relations stated in the following passage. Report only what the passage supports. Entity types are short uppercase tags (e.g., PERSON, ORGANIZATION, METHOD_OR_TECHNIQUE, METRIC, DATASET, CONCEPT).

Respond with a single JSON object:
{"entities": [{"name": "...", "type": "...", "description": "..."}],
 "relations": [{"source": "<entity name>", "target": "<entity name>", "description": "..."}]}

Node: {node_id}
Passage:
{content}
)";

constexpr const char* kExtractTable = R"(Extract entities and relations from the following table. First create exactly one primary entity of type "TABLE", named after the table caption (or a short synthesized label if there is none). Extract every row and column header as its own entity and link each one to the primary entity with a relation of kind "ContainedIn". Link any other notable cell-level entities to the primary entity as well.

Respond with a single JSON object:
{"entities": [{"name": "...", "type": "...", "description": "..."}],
 "relations": [{"source": "<entity name>", "target": "<entity name>", "description": "...", "kind": "ContainedIn"}]}

Node: {node_id}
Table:
{content}
)";

constexpr const char* kExtractFormula = R"(Extract entities from the following formula. First create exactly one primary entity of type "FORMULA", named after the formula's label or a short synthesized description. Extract each symbol or quantity it defines or uses as an entity and link it to the primary entity.

Respond with a single JSON object:
{"entities": [{"name": "...", "type": "...", "description": "..."}],
 "relations": [{"source": "<entity name>", "target": "<entity name>", "description": "..."}]}

Node: {node_id}
Formula:
{content}
)";

constexpr const char* kExtractVision = R"(You are given a figure from a document. Identify the entities it depicts (objects, labels, axes, named components) and the relationships between them.

Respond with a single JSON object:
{"entities": [{"name": "...", "type": "...", "description": "..."}],
 "relations": [{"source": "<entity name>", "target": "<entity name>", "description": "..."}]}

Node: {node_id}
Caption: {content}
)";

constexpr const char* kQueryExtract = R"(Identify the key entities mentioned in the question that should anchor retrieval in the document, such as named methods, objects, people, or concepts.

Respond with a single JSON object:
{"entities": [{"entity_name": "...", "entity_type": "..."}]}

Return an empty list if the question names no concrete entity.

Question: {query}
)";

constexpr const char* kSelectSection = R"(Select the sections of the document most relevant to the question. Respond with a single JSON object {"sections": ["<exact section title>", ...]} using titles copied verbatim from the list. Choose at least one section.

Question: {query}

Sections:
{candidates}
)";

constexpr const char* kMap = R"(Answer the following question using only the evidence provided. Be concise and factual; if the evidence is insufficient, say so.

Question: {question}

Evidence:
{evidence}
)";

constexpr const char* kReduce = R"(Synthesize the final answer to the question from the partial results below. {instructions}

Question: {query}

Partial results:
{parts}
)";

constexpr const char* kAnswerExtract = R"(Extract the key answer span from the response below (e.g., the entity, number, or option it concludes with). Return only the extracted answer, with no extra words.

Response: {raw}
)";

struct TemplateDef {
    const char* name;
    std::vector<std::string> slots;
    const char* text;
};

const std::vector<TemplateDef>& builtin_templates() {
    static const std::vector<TemplateDef> defs = {
        {"classify", {"query"}, kClassify},
        {"decompose", {"query"}, kDecompose},
        {"filter_spec", {"query"}, kFilterSpec},
        {"er_adjudicate", {"new_entity", "candidates"}, kErAdjudicate},
        {"section_filter", {"context", "candidates"}, kSectionFilter},
        {"extract_text", {"node_id", "content"}, kExtractText},
        {"extract_table", {"node_id", "content"}, kExtractTable},
        {"extract_formula", {"node_id", "content"}, kExtractFormula},
        {"extract_vision", {"node_id", "content"}, kExtractVision},
        {"query_extract", {"query"}, kQueryExtract},
        {"select_section", {"query", "candidates"}, kSelectSection},
        {"map", {"question", "evidence"}, kMap},
        {"reduce", {"query", "parts", "instructions"}, kReduce},
        {"answer_extract", {"raw"}, kAnswerExtract},
    };
    return defs;
}

void replace_all(std::string& text, const std::string& needle, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

}  // namespace

PromptLibrary::PromptLibrary() {
    for (const auto& def : builtin_templates()) {
        templates_[def.name] = PromptTemplate{def.name, def.slots, def.text};
    }
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw Error("unknown prompt template: " + name);
    return it->second;
}

bool PromptLibrary::has(const std::string& name) const { return templates_.count(name) > 0; }

RenderedPrompt PromptLibrary::render(const std::string& name,
                                     const std::map<std::string, std::string>& slots,
                                     const std::string& salient) const {
    const PromptTemplate& tpl = get(name);
    std::string text = tpl.text;
    for (const std::string& slot : tpl.slots) {
        auto it = slots.find(slot);
        if (it == slots.end())
            throw Error("prompt '" + name + "': slot '" + slot + "' not bound");
        replace_all(text, "{" + slot + "}", it->second);
    }
    return RenderedPrompt{name, salient, text, slots};
}

void PromptLibrary::load_overrides(const std::filesystem::path& dir, Warnings* warnings) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("prompt override directory not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        const std::string name = entry.path().stem().string();
        auto it = templates_.find(name);
        if (it == templates_.end()) {
            warn(warnings, "ignoring prompt override with unknown name: " + name);
            continue;
        }
        std::ifstream in(entry.path());
        std::stringstream buffer;
        buffer << in.rdbuf();
        it->second.text = buffer.str();
    }
}

std::vector<std::string> PromptLibrary::template_names() const {
    std::vector<std::string> names;
    names.reserve(templates_.size());
    for (const auto& [name, tpl] : templates_) names.push_back(name);
    return names;
}

}  // namespace bookrag
