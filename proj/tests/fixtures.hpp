#pragma once

// Shared synthetic fixtures and independent oracles for the test suites.
// Oracles are deliberately written from scratch (dense math, brute force)
// so they stay independent of the implementation paths they check.

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bookrag/block.hpp"
#include "bookrag/book_index.hpp"
#include "bookrag/entity_resolution.hpp"
#include "bookrag/mock_gateway.hpp"
#include "bookrag/skyline.hpp"

namespace fx {

// ---- temp dirs -------------------------------------------------------------

// Unique directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---- figure-style tree fixture ----------------------------------------------

// Seven blocks: two genuine section headings (font 14) around a mis-tagged
// large-font title, plus text/table/image leaves.
bookrag::DocumentSource fig_tree_source();
void script_fig_tree(bookrag::MockGateway& mock);

// ---- handbook fixture --------------------------------------------------------

// A 15-block synthetic handbook with three level-1 sections, five image
// nodes on pages 3/5/6/8/9 (one more on page 11), a table, and a formula.
// The scripted extraction contains one alias pair ("gradient method" in two
// nodes) that must merge during resolution.
//
// `dir` receives the block-list file and dummy image bytes.
bookrag::DocumentSource handbook_source(const std::filesystem::path& dir);
void script_handbook_build(bookrag::MockGateway& mock);
bookrag::BuildConfig handbook_build_config();

// The ten scripted handbook queries (classification, planning and synthesis
// responses included).
struct HandbookQuery {
    std::string question;
    std::string category;  // "single-hop" | "multi-hop" | "global"
};
std::vector<HandbookQuery> handbook_queries();
void script_handbook_queries(bookrag::MockGateway& mock);

bookrag::BookIndex build_handbook_index(const std::filesystem::path& dir,
                                        bookrag::BuildStats* stats = nullptr);

// Deep structural equality, embeddings compared bitwise.
bool index_equal(const bookrag::BookIndex& a, const bookrag::BookIndex& b);

// ---- randomized documents (persistence / determinism fuzzing) ----------------

bookrag::DocumentSource random_source(std::mt19937& rng, const std::filesystem::path& dir,
                                      const std::string& doc_id);

// ---- alias corpora for resolution-vs-oracle equivalence ----------------------

// A stream of entity mentions with scripted alias structure: mentions in the
// same group are aliases. The first two stream items are always from two
// distinct groups so no resolution step ever faces a single-entry candidate
// pool (where the no-gradient rule forces "add new" by construction).
struct AliasCorpus {
    struct Item {
        std::string name;
        int group;
    };
    std::vector<Item> items;  // resolution order
};

AliasCorpus random_alias_corpus(std::mt19937& rng);

// Group-structured deterministic backend: embeddings are one basis vector
// per group; rerank scores 1.0 for same-group pairs and 0.1 otherwise.
class GroupMock : public bookrag::MockGateway {
public:
    explicit GroupMock(std::size_t dim = 64);
    std::vector<double> embed(const std::string& text) override;
    std::vector<double> rerank(const std::string& query,
                               const std::vector<std::string>& candidates) override;
};

// Partition of item indices produced by sequential resolve (blocks keyed by
// surviving canonical entity).
std::vector<std::set<std::size_t>> resolve_partition(const AliasCorpus& corpus,
                                                     const bookrag::ResolutionConfig& cfg);

// Brute-force all-pairs oracle: transitive closure of alias matches.
std::vector<std::set<std::size_t>> closure_partition(const AliasCorpus& corpus);

bool same_partition(std::vector<std::set<std::size_t>> a,
                    std::vector<std::set<std::size_t>> b);

// ---- oracles -----------------------------------------------------------------

// O(n^2) dominance scan.
std::vector<bookrag::SkylinePoint> skyline_oracle(
    const std::vector<bookrag::SkylinePoint>& points);

// Dense power iteration, independent of the library implementation.
std::vector<double> pagerank_oracle(std::size_t n,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                    std::vector<double> personalization, double damping,
                                    int iterations);

}  // namespace fx
