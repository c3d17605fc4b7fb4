#include "bookrag/vector_store.hpp"

#include <algorithm>
#include <cmath>

namespace bookrag {

VectorStore::VectorStore(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw DimensionMismatch("vector store dimension must be positive");
}

void VectorStore::check_dim(const std::vector<double>& v) const {
    if (v.size() != dim_)
        throw DimensionMismatch("expected dimension " + std::to_string(dim_) + ", got " +
                                std::to_string(v.size()));
}

void VectorStore::add(const std::string& id, std::vector<double> embedding) {
    check_dim(embedding);
    if (contains(id)) throw Error("vector store: duplicate id '" + id + "'");
    entries_.emplace(id, std::move(embedding));
}

void VectorStore::update(const std::string& id, std::vector<double> embedding) {
    check_dim(embedding);
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownEntity("vector store: unknown id '" + id + "'");
    it->second = std::move(embedding);
}

void VectorStore::remove(const std::string& id) {
    if (entries_.erase(id) == 0)
        throw UnknownEntity("vector store: unknown id '" + id + "'");
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<VectorStore::Scored> VectorStore::nearest(const std::vector<double>& query,
                                                      std::size_t k) const {
    check_dim(query);
    std::vector<Scored> scored;
    scored.reserve(entries_.size());
    for (const auto& [id, v] : entries_)
        scored.push_back(Scored{id, cosine_similarity(query, v)});
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.id < b.id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace bookrag
