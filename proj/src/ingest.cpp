#include "bookrag/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace bookrag {

std::string layout_type_name(LayoutType t) {
    switch (t) {
        case LayoutType::Title: return "Title";
        case LayoutType::Text: return "Text";
        case LayoutType::Table: return "Table";
        case LayoutType::Image: return "Image";
        case LayoutType::Formula: return "Formula";
    }
    return "Text";
}

LayoutType parse_layout_type(const std::string& s, bool* coerced) {
    const std::string key = to_lower(trim(s));
    if (coerced) *coerced = false;
    if (key == "title") return LayoutType::Title;
    if (key == "text") return LayoutType::Text;
    if (key == "table") return LayoutType::Table;
    if (key == "image") return LayoutType::Image;
    if (key == "formula") return LayoutType::Formula;
    if (coerced) *coerced = true;
    return LayoutType::Text;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "id", "type", "content", "image_path", "page", "order", "font_size", "bbox"};

Block parse_block_record(const nlohmann::json& rec, std::size_t line_no, Warnings* warnings) {
    if (!rec.is_object())
        throw FormatError("line " + std::to_string(line_no) + ": record is not an object");

    auto require = [&](const char* key) -> const nlohmann::json& {
        auto it = rec.find(key);
        if (it == rec.end())
            throw MissingField("line " + std::to_string(line_no) + ": missing field '" +
                               key + "'");
        return *it;
    };

    Block b;
    b.id = require("id").get<std::string>();
    bool coerced = false;
    b.type = parse_layout_type(require("type").get<std::string>(), &coerced);
    if (coerced)
        warn(warnings, "block " + b.id + ": unknown layout type '" +
                           rec["type"].get<std::string>() + "' coerced to Text");

    if (rec.contains("content")) b.content = rec["content"].get<std::string>();
    if (rec.contains("image_path")) b.image_path = rec["image_path"].get<std::string>();
    if (b.type == LayoutType::Image && b.image_path.empty())
        throw MissingField("line " + std::to_string(line_no) + ": image block '" + b.id +
                           "' has no image_path");
    if (b.type != LayoutType::Image && b.content.empty() && b.image_path.empty())
        throw MissingField("line " + std::to_string(line_no) + ": block '" + b.id +
                           "' has neither content nor image_path");

    if (!require("page").is_number_integer())
        throw FormatError("line " + std::to_string(line_no) + ": page is not an integer");
    b.page = rec["page"].get<int>();
    if (b.page < 1)
        throw FormatError("line " + std::to_string(line_no) + ": page must be >= 1");
    if (!require("order").is_number_integer())
        throw FormatError("line " + std::to_string(line_no) + ": order is not an integer");
    b.order = rec["order"].get<long long>();

    if (rec.contains("font_size")) b.font_size = rec["font_size"].get<double>();
    if (rec.contains("bbox")) {
        const auto& bb = rec["bbox"];
        if (!bb.is_array() || bb.size() != 4)
            throw FormatError("line " + std::to_string(line_no) +
                              ": bbox must be [x0,y0,x1,y1]");
        b.bbox = BBox{bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                      bb[3].get<double>()};
        if (b.bbox->x0 < 0 || b.bbox->y0 < 0 || b.bbox->x1 < 0 || b.bbox->y1 < 0)
            throw FormatError("line " + std::to_string(line_no) +
                              ": bbox coordinates must be non-negative");
    }
    for (auto it = rec.begin(); it != rec.end(); ++it) {
        if (!kKnownKeys.count(it.key())) b.extra[it.key()] = it.value();
    }
    return b;
}

}  // namespace

DocumentSource load_blocks(const std::filesystem::path& path, Warnings* warnings) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open block-list file: " + path.string());

    DocumentSource src;
    src.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!header_seen) {
            if (!rec.is_object() || !rec.contains("format_version"))
                throw FormatError("first record must carry format_version");
            if (rec["format_version"].get<std::string>() != "1")
                throw FormatError("unsupported block-list format_version '" +
                                  rec["format_version"].get<std::string>() + "'");
            if (rec.contains("doc_id")) src.doc_id = rec["doc_id"].get<std::string>();
            if (rec.contains("page_count")) src.page_count = rec["page_count"].get<int>();
            header_seen = true;
            continue;
        }
        src.blocks.push_back(parse_block_record(rec, line_no, warnings));
    }
    if (!header_seen) throw FormatError("empty block-list file: " + path.string());

    if (src.doc_id.empty()) src.doc_id = path.stem().string();

    std::stable_sort(src.blocks.begin(), src.blocks.end(),
                     [](const Block& a, const Block& b) { return a.order < b.order; });

    std::set<long long> orders;
    std::set<std::string> ids;
    int max_page = 0;
    for (const Block& b : src.blocks) {
        if (!orders.insert(b.order).second)
            throw FormatError("duplicate order value " + std::to_string(b.order) +
                              " (block " + b.id + ")");
        if (!ids.insert(b.id).second)
            throw FormatError("duplicate block id '" + b.id + "'");
        max_page = std::max(max_page, b.page);
        if (b.type == LayoutType::Image) {
            const auto resolved = src.base_dir / b.image_path;
            if (!std::filesystem::exists(resolved))
                throw UnresolvableImage("block " + b.id + ": image not found: " +
                                        resolved.string());
        }
    }
    if (src.page_count == 0) src.page_count = max_page;
    if (src.page_count < max_page)
        throw FormatError("header page_count " + std::to_string(src.page_count) +
                          " is below the highest referenced page " +
                          std::to_string(max_page));
    return src;
}

void save_blocks(const DocumentSource& src, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write block-list file: " + path.string());
    nlohmann::json header;
    header["format_version"] = "1";
    header["doc_id"] = src.doc_id;
    header["page_count"] = src.page_count;
    out << header.dump() << "\n";
    for (const Block& b : src.blocks) {
        nlohmann::json rec;
        rec["id"] = b.id;
        rec["type"] = layout_type_name(b.type);
        if (!b.content.empty()) rec["content"] = b.content;
        if (!b.image_path.empty()) rec["image_path"] = b.image_path;
        rec["page"] = b.page;
        rec["order"] = b.order;
        if (b.font_size) rec["font_size"] = *b.font_size;
        if (b.bbox) rec["bbox"] = {b.bbox->x0, b.bbox->y0, b.bbox->x1, b.bbox->y1};
        for (auto it = b.extra.begin(); it != b.extra.end(); ++it) rec[it.key()] = it.value();
        out << rec.dump() << "\n";
    }
}

std::vector<std::string> validate_source(const DocumentSource& src) {
    std::vector<std::string> violations;
    if (src.blocks.empty()) {
        violations.push_back("no blocks");
        return violations;
    }
    std::set<long long> orders;
    long long prev_order = 0;
    bool first = true;
    for (const Block& b : src.blocks) {
        if (!orders.insert(b.order).second)
            violations.push_back("block " + b.id + ": duplicate order " +
                                 std::to_string(b.order));
        if (!first && b.order <= prev_order)
            violations.push_back("block " + b.id + ": order not strictly increasing");
        prev_order = b.order;
        first = false;
        if (b.page < 1) violations.push_back("block " + b.id + ": page < 1");
        if (b.page > src.page_count && src.page_count > 0)
            violations.push_back("block " + b.id + ": page exceeds page_count");
        if (b.bbox) {
            if (b.bbox->x0 < 0 || b.bbox->y0 < 0 || b.bbox->x1 < 0 || b.bbox->y1 < 0)
                violations.push_back("block " + b.id + ": negative bbox coordinate");
        }
        if ((b.type == LayoutType::Text || b.type == LayoutType::Title) && b.content.empty())
            violations.push_back("block " + b.id + ": empty content for " +
                                 layout_type_name(b.type));
        if (b.type == LayoutType::Image) {
            if (b.image_path.empty()) {
                violations.push_back("block " + b.id + ": image block without image_path");
            } else if (!std::filesystem::exists(src.base_dir / b.image_path)) {
                violations.push_back("block " + b.id + ": unresolvable image reference");
            }
        }
    }
    return violations;
}

}  // namespace bookrag
