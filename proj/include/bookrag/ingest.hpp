#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bookrag/block.hpp"
#include "bookrag/common.hpp"

namespace bookrag {

// Block-list files are line-delimited JSON. The first record is a header
// carrying format_version ("1"), plus optional doc_id and page_count;
// every following line is one block record:
//   {"id":..,"type":..,"content"|"image_path":..,"page":..,"order":..,
//    "font_size"?,"bbox"?, ...extras}
//
// Throws FormatError / MissingField / UnresolvableImage. Non-fatal issues
// (unknown layout types) are reported through `warnings`.
DocumentSource load_blocks(const std::filesystem::path& path, Warnings* warnings = nullptr);

// Inverse of load_blocks; load_blocks(save_blocks(src)) == src.
void save_blocks(const DocumentSource& src, const std::filesystem::path& path);

// Reports every invariant violation instead of throwing; empty means valid.
std::vector<std::string> validate_source(const DocumentSource& src);

}  // namespace bookrag
