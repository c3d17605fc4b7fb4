#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bookrag/block.hpp"
#include "bookrag/common.hpp"

namespace bookrag {

enum class NodeType { Section, Text, Table, Image, Formula };

std::string node_type_name(NodeType t);
NodeType parse_node_type(const std::string& s);
NodeType node_type_from_layout(LayoutType t);

// Reserved id of the synthetic document root (level 0).
inline const std::string kRootId = "__root__";

struct TreeNode {
    std::string id;
    NodeType type = NodeType::Text;
    std::optional<int> level;  // Sections only; the synthetic root carries 0
    std::string content;
    std::string image_path;
    int page = 0;
    long long order = 0;
    std::optional<double> font_size;
    nlohmann::json extra = nlohmann::json::object();
    std::string parent;                 // empty only for the root
    std::vector<std::string> children;  // document order
};

struct DocTree {
    std::string root;
    std::map<std::string, TreeNode> nodes;

    bool has(const std::string& id) const { return nodes.count(id) > 0; }
    const TreeNode& at(const std::string& id) const;
    TreeNode& at(const std::string& id);

    // All non-root ids sorted by block order.
    std::vector<std::string> document_order() const;
    std::size_t size() const { return nodes.size(); }
};

// The node plus all transitive descendants. Throws UnknownNode.
std::set<std::string> subtree(const DocTree& tree, const std::string& section_id);

// Depth of a node measured in parent hops from the root.
std::size_t node_depth(const DocTree& tree, const std::string& id);

// Nearest ancestor of `id` (inclusive of id itself if it is a Section)
// that is a Section; the root id if none.
std::string nearest_section_ancestor(const DocTree& tree, const std::string& id);

// Structural invariant check; empty result means valid.
std::vector<std::string> validate_tree(const DocTree& tree);

}  // namespace bookrag
