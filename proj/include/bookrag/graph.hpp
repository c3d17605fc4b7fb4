#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bookrag/common.hpp"

namespace bookrag {

struct Entity {
    std::string id;
    std::string name;  // display casing preserved; matching uses normalize_name
    std::string entity_type;
    std::string description;
    std::set<std::string> origins;  // tree node ids this entity was extracted from
    std::vector<double> embedding;
};

struct Relation {
    std::string source;  // entity id (or extraction-local name before resolution)
    std::string target;
    std::string description;
    std::string kind;  // e.g. "ContainedIn"; empty for generic relations
};

struct KnowledgeGraph {
    std::map<std::string, Entity> entities;
    std::vector<Relation> relations;  // multiset; parallel edges allowed

    bool has(const std::string& id) const { return entities.count(id) > 0; }
    const Entity& at(const std::string& id) const;
    Entity& at(const std::string& id);
    void add_entity(Entity e);

    // Dangling relation endpoints; empty means referentially sound.
    std::vector<std::string> validate() const;
};

// The string a model sees for an entity, used both for embedding and for
// rerank candidates: "name (type): description", cut at `char_budget`.
std::string embedding_input(const Entity& e, std::size_t char_budget = 512);

}  // namespace bookrag
