#pragma once

#include <map>
#include <string>
#include <vector>

#include "bookrag/common.hpp"

namespace bookrag {

// Exact (brute-force) cosine-similarity store over entity embeddings.
// Corpora are per-document, so exactness costs little and keeps retrieval
// deterministic.
class VectorStore {
public:
    explicit VectorStore(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    bool contains(const std::string& id) const { return entries_.count(id) > 0; }

    void add(const std::string& id, std::vector<double> embedding);
    void update(const std::string& id, std::vector<double> embedding);
    void remove(const std::string& id);

    struct Scored {
        std::string id;
        double similarity;
    };

    // k nearest by cosine similarity, ties broken by id ascending.
    // Returns fewer than k iff the store is smaller than k.
    std::vector<Scored> nearest(const std::vector<double>& query, std::size_t k) const;

    const std::map<std::string, std::vector<double>>& entries() const { return entries_; }

private:
    void check_dim(const std::vector<double>& v) const;

    std::size_t dim_;
    std::map<std::string, std::vector<double>> entries_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace bookrag
