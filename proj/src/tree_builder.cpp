#include "bookrag/tree_builder.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace bookrag {

namespace {

std::string render_candidate_line(const Block& b) {
    std::ostringstream line;
    line << "block_id=" << b.id;
    if (b.font_size) line << " font_size=" << *b.font_size;
    line << " page=" << b.page << " text=\"" << collapse_whitespace(b.content) << "\"";
    return line.str();
}

std::string render_context(const std::vector<std::pair<std::string, int>>& outline) {
    if (outline.empty()) return "(none yet)";
    std::ostringstream out;
    for (const auto& [title, level] : outline)
        out << "Level " << level << ": " << title << "\n";
    return out.str();
}

}  // namespace

std::vector<SectionVerdict> filter_sections(const DocumentSource& src, ModelGateway& gateway,
                                            int batch_size, const PromptLibrary& prompts,
                                            Warnings* warnings) {
    if (batch_size < 1) throw Error("filter_sections: batch_size must be >= 1");

    std::vector<const Block*> candidates;
    for (const Block& b : src.blocks)
        if (b.type == LayoutType::Title) candidates.push_back(&b);

    // block id -> verdict, filled batch by batch
    std::map<std::string, SectionVerdict> title_verdicts;
    std::vector<std::pair<std::string, int>> outline;  // level-1/2 context window

    for (std::size_t start = 0; start < candidates.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end =
            std::min(candidates.size(), start + static_cast<std::size_t>(batch_size));

        std::ostringstream batch_text;
        std::ostringstream id_list;
        for (std::size_t i = start; i < end; ++i) {
            batch_text << render_candidate_line(*candidates[i]) << "\n";
            if (i > start) id_list << ",";
            id_list << candidates[i]->id;
        }

        const RenderedPrompt prompt = prompts.render(
            "section_filter",
            {{"context", render_context(outline)}, {"candidates", batch_text.str()}},
            id_list.str());
        const std::string response = gateway.complete(prompt);

        nlohmann::json doc;
        bool parsed = false;
        try {
            const std::string payload = extract_json_payload(response);
            if (!payload.empty()) {
                doc = nlohmann::json::parse(payload);
                parsed = doc.contains("verdicts") && doc["verdicts"].is_array();
            }
        } catch (const nlohmann::json::exception&) {
            parsed = false;
        }

        if (!parsed) {
            warn(warnings, "section filter batch [" + id_list.str() +
                               "]: unparsable verdict, blocks default to Text");
            for (std::size_t i = start; i < end; ++i)
                title_verdicts[candidates[i]->id] =
                    SectionVerdict{candidates[i]->id, std::nullopt, NodeType::Text};
            continue;
        }

        for (const auto& v : doc["verdicts"]) {
            if (!v.is_object() || !v.contains("block_id")) continue;
            const std::string id = v["block_id"].get<std::string>();
            const bool in_batch =
                std::any_of(candidates.begin() + static_cast<std::ptrdiff_t>(start),
                            candidates.begin() + static_cast<std::ptrdiff_t>(end),
                            [&](const Block* b) { return b->id == id; });
            if (!in_batch) {
                warn(warnings, "section filter: verdict for unknown block '" + id +
                                   "' ignored");
                continue;
            }
            SectionVerdict verdict{id, std::nullopt, NodeType::Text};
            if (v.contains("level") && v["level"].is_number_integer()) {
                const int level = v["level"].get<int>();
                if (level >= 1) {
                    verdict.level = level;
                    verdict.type = NodeType::Section;
                }
            }
            title_verdicts[id] = verdict;
        }

        for (std::size_t i = start; i < end; ++i) {
            const Block* b = candidates[i];
            auto it = title_verdicts.find(b->id);
            if (it == title_verdicts.end()) {
                warn(warnings, "section filter: no verdict for block '" + b->id +
                                   "', defaulting to Text");
                title_verdicts[b->id] = SectionVerdict{b->id, std::nullopt, NodeType::Text};
            } else if (it->second.level && *it->second.level <= 2) {
                outline.emplace_back(collapse_whitespace(b->content), *it->second.level);
            }
        }
    }

    std::vector<SectionVerdict> verdicts;
    verdicts.reserve(src.blocks.size());
    for (const Block& b : src.blocks) {
        if (b.type == LayoutType::Title) {
            verdicts.push_back(title_verdicts.at(b.id));
        } else {
            verdicts.push_back(SectionVerdict{b.id, std::nullopt, node_type_from_layout(b.type)});
        }
    }
    return verdicts;
}

DocTree assemble_tree(const DocumentSource& src, const std::vector<SectionVerdict>& verdicts,
                      Warnings* warnings) {
    std::map<std::string, const SectionVerdict*> by_id;
    for (const SectionVerdict& v : verdicts) by_id[v.block_id] = &v;
    for (const Block& b : src.blocks) {
        if (!by_id.count(b.id))
            throw Error("assemble_tree: no verdict for block '" + b.id + "'");
    }

    DocTree tree;
    tree.root = kRootId;
    TreeNode root;
    root.id = kRootId;
    root.type = NodeType::Section;
    root.level = 0;
    root.content = src.doc_id;
    root.order = -1;
    tree.nodes[kRootId] = root;

    // stack of open sections, innermost last
    std::vector<std::string> section_stack;
    std::optional<int> prev_section_level;

    for (const Block& b : src.blocks) {
        const SectionVerdict& v = *by_id.at(b.id);
        TreeNode node;
        node.id = b.id;
        node.type = v.type;
        node.content = b.content;
        node.image_path = b.image_path;
        node.page = b.page;
        node.order = b.order;
        node.font_size = b.font_size;
        node.extra = b.extra;

        if (v.type == NodeType::Section) {
            if (!v.level || *v.level < 1)
                throw Error("assemble_tree: section verdict for '" + b.id +
                            "' lacks a positive level");
            node.level = *v.level;
            if (prev_section_level && *v.level > *prev_section_level + 1)
                warn(warnings, "level jump: section '" + b.id + "' at level " +
                                   std::to_string(*v.level) + " follows level " +
                                   std::to_string(*prev_section_level));
            prev_section_level = *v.level;
            while (!section_stack.empty() &&
                   *tree.at(section_stack.back()).level >= *v.level)
                section_stack.pop_back();
            const std::string parent =
                section_stack.empty() ? kRootId : section_stack.back();
            node.parent = parent;
            tree.nodes[node.id] = node;
            tree.at(parent).children.push_back(node.id);
            section_stack.push_back(node.id);
        } else {
            const std::string parent =
                section_stack.empty() ? kRootId : section_stack.back();
            node.parent = parent;
            tree.nodes[node.id] = node;
            tree.at(parent).children.push_back(node.id);
        }
    }
    return tree;
}

}  // namespace bookrag
