#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bookrag {

enum class LayoutType { Title, Text, Table, Image, Formula };

std::string layout_type_name(LayoutType t);
// Unknown strings coerce to Text; `coerced` reports whether that happened.
LayoutType parse_layout_type(const std::string& s, bool* coerced = nullptr);

struct BBox {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    friend bool operator==(const BBox&, const BBox&) = default;
};

// One layout-parsed primitive: a title, paragraph, table, image or formula
// together with the layout features the parser attached to it.
struct Block {
    std::string id;
    LayoutType type = LayoutType::Text;
    std::string content;     // text; empty for pure image blocks
    std::string image_path;  // relative reference, Image blocks only
    int page = 1;
    long long order = 0;
    std::optional<double> font_size;
    std::optional<BBox> bbox;
    nlohmann::json extra = nlohmann::json::object();  // unknown keys, passed through
};

struct DocumentSource {
    std::string doc_id;
    int page_count = 0;
    std::vector<Block> blocks;  // sorted by order
    // Directory the block-list file was loaded from; image references
    // resolve against it. Not serialized.
    std::filesystem::path base_dir;
};

}  // namespace bookrag
