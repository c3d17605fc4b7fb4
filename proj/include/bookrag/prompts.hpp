#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bookrag/gateway.hpp"

namespace bookrag {

struct PromptTemplate {
    std::string name;
    std::vector<std::string> slots;
    std::string text;
};

// Owns every prompt template used by the pipeline. Templates ship as data
// files under prompts/ and are compiled in as defaults; a directory of
// overrides can replace any of them by file stem.
class PromptLibrary {
public:
    PromptLibrary();

    const PromptTemplate& get(const std::string& name) const;
    bool has(const std::string& name) const;

    // Substitutes {slot} placeholders. All declared slots must be bound.
    RenderedPrompt render(const std::string& name,
                          const std::map<std::string, std::string>& slots,
                          const std::string& salient) const;

    void load_overrides(const std::filesystem::path& dir, Warnings* warnings = nullptr);

    std::vector<std::string> template_names() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace bookrag
