#include "bookrag/tree.hpp"

#include <algorithm>

namespace bookrag {

std::string node_type_name(NodeType t) {
    switch (t) {
        case NodeType::Section: return "Section";
        case NodeType::Text: return "Text";
        case NodeType::Table: return "Table";
        case NodeType::Image: return "Image";
        case NodeType::Formula: return "Formula";
    }
    return "Text";
}

NodeType parse_node_type(const std::string& s) {
    const std::string key = to_lower(trim(s));
    if (key == "section") return NodeType::Section;
    if (key == "text") return NodeType::Text;
    if (key == "table") return NodeType::Table;
    if (key == "image") return NodeType::Image;
    if (key == "formula") return NodeType::Formula;
    throw FormatError("unknown node type: " + s);
}

NodeType node_type_from_layout(LayoutType t) {
    switch (t) {
        case LayoutType::Title: return NodeType::Text;  // Titles resolve via verdicts
        case LayoutType::Text: return NodeType::Text;
        case LayoutType::Table: return NodeType::Table;
        case LayoutType::Image: return NodeType::Image;
        case LayoutType::Formula: return NodeType::Formula;
    }
    return NodeType::Text;
}

const TreeNode& DocTree::at(const std::string& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw UnknownNode("unknown tree node: " + id);
    return it->second;
}

TreeNode& DocTree::at(const std::string& id) {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw UnknownNode("unknown tree node: " + id);
    return it->second;
}

std::vector<std::string> DocTree::document_order() const {
    std::vector<const TreeNode*> list;
    list.reserve(nodes.size());
    for (const auto& [id, node] : nodes) {
        if (id != root) list.push_back(&node);
    }
    std::sort(list.begin(), list.end(),
              [](const TreeNode* a, const TreeNode* b) { return a->order < b->order; });
    std::vector<std::string> out;
    out.reserve(list.size());
    for (const TreeNode* n : list) out.push_back(n->id);
    return out;
}

std::set<std::string> subtree(const DocTree& tree, const std::string& section_id) {
    const TreeNode& start = tree.at(section_id);
    std::set<std::string> out;
    std::vector<const TreeNode*> stack{&start};
    while (!stack.empty()) {
        const TreeNode* n = stack.back();
        stack.pop_back();
        if (!out.insert(n->id).second) continue;
        for (const std::string& child : n->children) stack.push_back(&tree.at(child));
    }
    return out;
}

std::size_t node_depth(const DocTree& tree, const std::string& id) {
    std::size_t depth = 0;
    const TreeNode* n = &tree.at(id);
    while (!n->parent.empty()) {
        n = &tree.at(n->parent);
        ++depth;
        if (depth > tree.size()) throw Error("parent cycle at node " + id);
    }
    return depth;
}

std::string nearest_section_ancestor(const DocTree& tree, const std::string& id) {
    const TreeNode* n = &tree.at(id);
    std::size_t hops = 0;
    while (true) {
        if (n->type == NodeType::Section) return n->id;
        if (n->parent.empty()) return tree.root;
        n = &tree.at(n->parent);
        if (++hops > tree.size()) throw Error("parent cycle at node " + id);
    }
}

std::vector<std::string> validate_tree(const DocTree& tree) {
    std::vector<std::string> violations;
    if (!tree.has(tree.root)) {
        violations.push_back("root id missing from node map");
        return violations;
    }
    const TreeNode& root = tree.at(tree.root);
    if (!root.parent.empty()) violations.push_back("root has a parent");
    if (!root.level || *root.level != 0) violations.push_back("root level is not 0");

    std::set<std::string> reached;
    for (const auto& [id, node] : tree.nodes) {
        if (id != node.id) violations.push_back("node map key mismatch at " + id);
        const bool is_root = id == tree.root;
        if (node.type == NodeType::Section) {
            if (!node.level) violations.push_back("section " + id + " has no level");
            else if (!is_root && *node.level < 1)
                violations.push_back("section " + id + " has non-positive level");
        } else if (node.level) {
            violations.push_back("non-section " + id + " carries a level");
        }
        if (node.type != NodeType::Section && !node.children.empty())
            violations.push_back("non-section " + id + " has children");
        if (!is_root) {
            if (node.parent.empty()) {
                violations.push_back("non-root " + id + " has no parent");
            } else if (!tree.has(node.parent)) {
                violations.push_back("node " + id + " has dangling parent " + node.parent);
            } else {
                const TreeNode& parent = tree.at(node.parent);
                const bool listed = std::find(parent.children.begin(), parent.children.end(),
                                              id) != parent.children.end();
                if (!listed)
                    violations.push_back("node " + id + " missing from parent's children");
                if (node.type == NodeType::Section && parent.level && node.level &&
                    *node.level <= *parent.level)
                    violations.push_back("section " + id +
                                         " level not greater than ancestor's");
            }
        }
        for (const std::string& child : node.children) {
            if (!tree.has(child)) {
                violations.push_back("node " + id + " has dangling child " + child);
            } else if (tree.at(child).parent != id) {
                violations.push_back("child " + child + " does not point back to " + id);
            }
        }
        long long prev = 0;
        bool first = true;
        for (const std::string& child : node.children) {
            if (!tree.has(child)) continue;
            const long long ord = tree.at(child).order;
            if (!first && ord <= prev)
                violations.push_back("children of " + id + " not in document order");
            prev = ord;
            first = false;
        }
    }

    // connectivity / acyclicity via traversal from the root
    try {
        reached = subtree(tree, tree.root);
    } catch (const Error& e) {
        violations.push_back(std::string("traversal failed: ") + e.what());
        return violations;
    }
    if (reached.size() != tree.nodes.size())
        violations.push_back("tree is not connected: " + std::to_string(reached.size()) +
                             " of " + std::to_string(tree.nodes.size()) + " reachable");
    return violations;
}

}  // namespace bookrag
