#include "bookrag/graph.hpp"

namespace bookrag {

const Entity& KnowledgeGraph::at(const std::string& id) const {
    auto it = entities.find(id);
    if (it == entities.end()) throw UnknownEntity("unknown entity: " + id);
    return it->second;
}

Entity& KnowledgeGraph::at(const std::string& id) {
    auto it = entities.find(id);
    if (it == entities.end()) throw UnknownEntity("unknown entity: " + id);
    return it->second;
}

void KnowledgeGraph::add_entity(Entity e) {
    if (e.id.empty()) throw Error("entity without id");
    if (has(e.id)) throw Error("duplicate entity id: " + e.id);
    entities.emplace(e.id, std::move(e));
}

std::vector<std::string> KnowledgeGraph::validate() const {
    std::vector<std::string> violations;
    for (const auto& [id, e] : entities) {
        if (e.name.empty()) violations.push_back("entity " + id + ": empty name");
        if (e.origins.empty()) violations.push_back("entity " + id + ": no origins");
    }
    for (std::size_t i = 0; i < relations.size(); ++i) {
        const Relation& r = relations[i];
        if (!has(r.source))
            violations.push_back("relation #" + std::to_string(i) + ": dangling source '" +
                                 r.source + "'");
        if (!has(r.target))
            violations.push_back("relation #" + std::to_string(i) + ": dangling target '" +
                                 r.target + "'");
        if (r.source == r.target)
            violations.push_back("relation #" + std::to_string(i) + ": self-loop at '" +
                                 r.source + "'");
    }
    return violations;
}

std::string embedding_input(const Entity& e, std::size_t char_budget) {
    std::string s = e.name + " (" + e.entity_type + "): " + e.description;
    if (s.size() > char_budget) s.resize(char_budget);
    return s;
}

}  // namespace bookrag
