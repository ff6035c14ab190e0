#pragma once

#include <optional>
#include <string>
#include <vector>

#include "groupsleuth/corpus.hpp"
#include "groupsleuth/embedding.hpp"

namespace groupsleuth {

/// Element-wise mean of the in-vocabulary token embeddings (Sum of Word
/// Embeddings); empty if every token is out of vocabulary.
std::optional<std::vector<float>> sentence_sowe(const std::vector<std::string>& tokens,
                                                const EmbeddingTable& table);

/// SoWE of a whole review text, used for co-review semantic similarity.
std::optional<std::vector<float>> review_sowe(const std::string& text,
                                              const EmbeddingTable& table);

struct ReviewerVector {
    std::string reviewer_id;
    std::vector<float> semantic;  // F, max-pooled over sentence SoWEs
    float nr = 0.f;               // fraction of reviews rated 1 or 2
    std::vector<float> v;         // F+1 = semantic then nr
};

/// Max-pool over the sentence SoWEs of all the reviewer's reviews, plus the
/// Negative Ratio. Throws if no review yields a usable sentence.
ReviewerVector reviewer_vector(const std::string& reviewer_id,
                               const std::vector<const Review*>& reviews,
                               const EmbeddingTable& table);

/// All-time vectors for every reviewer, indexed by dense reviewer index.
/// Reviewers with no usable sentences get a zero semantic vector.
std::vector<ReviewerVector> compute_reviewer_vectors(const Corpus& corpus,
                                                     const EmbeddingTable& table);

/// Vector restricted to reviews with date in [start, end]; falls back to the
/// all-time vector when the reviewer wrote nothing usable in the window.
ReviewerVector reviewer_vector_windowed(const Corpus& corpus, int reviewer_dense,
                                        std::int32_t start, std::int32_t end,
                                        const EmbeddingTable& table,
                                        const ReviewerVector& all_time);

void write_reviewer_vectors(const std::vector<ReviewerVector>& vecs, const std::string& path);
std::vector<ReviewerVector> load_reviewer_vectors(const std::string& path);

}  // namespace groupsleuth
