#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bookrag {

// Base for every library error. Subtypes map onto CLI exit codes: data
// errors exit 2, gateway errors exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- ingest ------------------------------------------------------------
struct FormatError : Error { using Error::Error; };
struct MissingField : Error { using Error::Error; };
struct UnresolvableImage : Error { using Error::Error; };

// -- gateway -----------------------------------------------------------
struct GatewayError : Error { using Error::Error; };
struct TimeoutError : GatewayError { using GatewayError::GatewayError; };
struct MalformedVerdict : Error { using Error::Error; };

// -- tree / graph ------------------------------------------------------
struct UnknownNode : Error { using Error::Error; };
struct UnknownEntity : Error { using Error::Error; };
struct EmptyExtraction : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyDocument : Error { using Error::Error; };

// -- persistence -------------------------------------------------------
struct IoError : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct CorruptIndex : Error { using Error::Error; };

// -- planner / operators -----------------------------------------------
struct PlanValidationError : Error { using Error::Error; };
struct InvalidRange : Error { using Error::Error; };
struct MissingScore : Error { using Error::Error; };
struct NoSectionSelected : Error { using Error::Error; };

// -- evaluation / config -----------------------------------------------
struct EmptyDataset : Error { using Error::Error; };
struct EmptyGold : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
    if (sink) sink->push_back(std::move(message));
}

// -- small string helpers ------------------------------------------------

std::string to_lower(std::string s);
std::string trim(const std::string& s);
std::string collapse_whitespace(const std::string& s);

// trim + collapse internal whitespace + lowercase; used wherever two
// user-visible strings are compared for identity
std::string normalize_name(const std::string& s);

// lowercase alphanumeric word list ("Alpha, beta!" -> {"alpha","beta"})
std::vector<std::string> tokenize(const std::string& s);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string to_hex64(std::uint64_t v);

std::string base64_encode(const unsigned char* data, std::size_t len);

// Pulls the first balanced JSON object or array out of model output,
// tolerating ``` fences and surrounding prose. Empty result if none.
std::string extract_json_payload(const std::string& text);

}  // namespace bookrag
