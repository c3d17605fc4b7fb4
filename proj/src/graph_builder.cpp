#include "bookrag/graph_builder.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace bookrag {

namespace {

NodeExtraction parse_extraction(const std::string& response, const std::string& node_id) {
    nlohmann::json doc;
    try {
        const std::string payload = extract_json_payload(response);
        if (payload.empty()) throw MalformedVerdict("extraction: no JSON in model output");
        doc = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedVerdict("extraction for node " + node_id + ": " + e.what());
    }

    NodeExtraction out;
    if (doc.contains("entities") && doc["entities"].is_array()) {
        for (const auto& je : doc["entities"]) {
            if (!je.is_object() || !je.contains("name")) continue;
            Entity e;
            e.name = collapse_whitespace(trim(je["name"].get<std::string>()));
            if (e.name.empty()) continue;
            if (je.contains("type") && je["type"].is_string())
                e.entity_type = je["type"].get<std::string>();
            if (je.contains("description") && je["description"].is_string())
                e.description = je["description"].get<std::string>();
            out.entities.push_back(std::move(e));
        }
    }
    if (doc.contains("relations") && doc["relations"].is_array()) {
        for (const auto& jr : doc["relations"]) {
            if (!jr.is_object() || !jr.contains("source") || !jr.contains("target")) continue;
            Relation r;
            r.source = normalize_name(jr["source"].get<std::string>());
            r.target = normalize_name(jr["target"].get<std::string>());
            if (jr.contains("description") && jr["description"].is_string())
                r.description = jr["description"].get<std::string>();
            if (jr.contains("kind") && jr["kind"].is_string())
                r.kind = jr["kind"].get<std::string>();
            if (!r.source.empty() && !r.target.empty() && r.source != r.target)
                out.relations.push_back(std::move(r));
        }
    }
    return out;
}

// Exactly one primary typed entity; all others star-linked to it.
void enforce_primary_star(NodeExtraction& ex, const TreeNode& node,
                          const std::string& primary_type, Warnings* warnings) {
    std::size_t primary_index = ex.entities.size();
    for (std::size_t i = 0; i < ex.entities.size(); ++i) {
        if (ex.entities[i].entity_type == primary_type) {
            if (primary_index == ex.entities.size()) {
                primary_index = i;
            } else {
                warn(warnings, "node " + node.id + ": multiple " + primary_type +
                                   " entities, keeping '" +
                                   ex.entities[primary_index].name + "'");
                ex.entities[i].entity_type = "CONCEPT";
            }
        }
    }
    if (primary_index == ex.entities.size()) {
        Entity primary;
        primary.name = to_lower(primary_type) + " " + node.id;
        primary.entity_type = primary_type;
        primary.description = collapse_whitespace(node.content).substr(0, 120);
        ex.entities.insert(ex.entities.begin(), std::move(primary));
        primary_index = 0;
        warn(warnings, "node " + node.id + ": model produced no " + primary_type +
                           " entity, synthesized one");
    }
    const std::string primary_key = normalize_name(ex.entities[primary_index].name);

    for (const Entity& e : ex.entities) {
        const std::string key = normalize_name(e.name);
        if (key == primary_key) continue;
        const bool linked = std::any_of(
            ex.relations.begin(), ex.relations.end(), [&](const Relation& r) {
                return (r.source == key && r.target == primary_key) ||
                       (r.source == primary_key && r.target == key);
            });
        if (!linked) {
            Relation r;
            r.source = key;
            r.target = primary_key;
            r.description = "extracted from the same " + to_lower(primary_type);
            r.kind = "ContainedIn";
            ex.relations.push_back(std::move(r));
        }
    }
}

}  // namespace

NodeExtraction extract_node_subgraph(
    const TreeNode& node, ModelGateway& gateway, const PromptLibrary& prompts,
    const std::function<std::vector<unsigned char>(const std::string&)>& image_loader,
    Warnings* warnings) {
    NodeExtraction ex;

    if (node.type == NodeType::Section) {
        const std::string heading = collapse_whitespace(trim(node.content));
        if (heading.empty()) throw EmptyExtraction("section " + node.id + ": empty heading");
        Entity e;
        e.name = heading;
        e.entity_type = "SECTION";
        // the heading itself, not a shared boilerplate string: identical
        // descriptions would make every section a rerank near-duplicate
        e.description = heading;
        e.origins = {node.id};
        ex.entities.push_back(std::move(e));
        return ex;
    }

    std::string response;
    if (node.type == NodeType::Image) {
        std::vector<unsigned char> bytes;
        if (image_loader && !node.image_path.empty()) bytes = image_loader(node.image_path);
        std::string caption = node.content;
        if (caption.empty() && node.extra.contains("caption") &&
            node.extra["caption"].is_string())
            caption = node.extra["caption"].get<std::string>();
        const RenderedPrompt prompt = prompts.render(
            "extract_vision", {{"node_id", node.id}, {"content", caption}}, node.id);
        response = gateway.complete_vision(prompt, bytes);
    } else {
        if (trim(node.content).empty())
            throw EmptyExtraction("node " + node.id + ": empty content");
        const char* tpl = "extract_text";
        if (node.type == NodeType::Table) tpl = "extract_table";
        if (node.type == NodeType::Formula) tpl = "extract_formula";
        const RenderedPrompt prompt =
            prompts.render(tpl, {{"node_id", node.id}, {"content", node.content}}, node.id);
        response = gateway.complete(prompt);
    }

    ex = parse_extraction(response, node.id);
    if (node.type == NodeType::Table) enforce_primary_star(ex, node, "TABLE", warnings);
    if (node.type == NodeType::Formula) enforce_primary_star(ex, node, "FORMULA", warnings);

    if (ex.entities.empty())
        throw EmptyExtraction("node " + node.id + ": model returned no entities");

    // de-duplicate within the node by normalized name (first occurrence wins)
    std::map<std::string, std::size_t> seen;
    std::vector<Entity> unique;
    for (Entity& e : ex.entities) {
        const std::string key = normalize_name(e.name);
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen[key] = unique.size();
            e.origins = {node.id};
            unique.push_back(std::move(e));
        } else if (!e.description.empty() &&
                   unique[it->second].description.find(e.description) == std::string::npos) {
            unique[it->second].description += "\n" + e.description;
        }
    }
    ex.entities = std::move(unique);

    // keep only relations whose endpoints were extracted here
    std::vector<Relation> kept;
    for (Relation& r : ex.relations) {
        if (seen.count(r.source) && seen.count(r.target)) kept.push_back(std::move(r));
    }
    ex.relations = std::move(kept);
    return ex;
}

void embed_entity(Entity& e, ModelGateway& gateway, std::size_t char_budget) {
    if (e.name.empty()) throw Error("embed_entity: entity has empty name");
    e.embedding = gateway.embed(embedding_input(e, char_budget));
    if (e.embedding.size() != gateway.embedding_dim())
        throw DimensionMismatch("embedding backend returned wrong dimension");
}

}  // namespace bookrag
