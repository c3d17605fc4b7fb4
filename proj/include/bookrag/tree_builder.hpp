#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bookrag/block.hpp"
#include "bookrag/gateway.hpp"
#include "bookrag/prompts.hpp"
#include "bookrag/tree.hpp"

namespace bookrag {

// Outcome of section filtering for one block. Non-Title blocks pass
// through with their layout type; Title blocks get a model verdict:
// a level (=> Section) or none (=> demoted to Text).
struct SectionVerdict {
    std::string block_id;
    std::optional<int> level;
    NodeType type = NodeType::Text;
};

// Runs the model over Title candidates in batches. Each batch prompt
// carries the running outline of level-1/2 sections resolved so far, so
// batches must stay sequential. Unparsable verdicts demote the affected
// blocks to Text and are reported as warnings.
std::vector<SectionVerdict> filter_sections(const DocumentSource& src, ModelGateway& gateway,
                                            int batch_size, const PromptLibrary& prompts,
                                            Warnings* warnings = nullptr);

// Assembles parent-child edges from verdict levels and document order:
// leaves attach to the most recent open Section, Sections attach to the
// nearest preceding Section of strictly smaller level (else the root).
DocTree assemble_tree(const DocumentSource& src, const std::vector<SectionVerdict>& verdicts,
                      Warnings* warnings = nullptr);

}  // namespace bookrag
