#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "groupsleuth/corpus.hpp"
#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

// Lowercased runs of Unicode-alphanumeric bytes (ASCII alnum plus any
// non-ASCII byte); everything else separates tokens.
std::vector<std::string> tokenize(const std::string& text);

// Splits on '.', '!', '?'; drops empty sentences.
std::vector<std::string> split_sentences(const std::string& text);

struct EmbeddingTable {
    std::map<std::string, int> vocab;  // word -> row
    Tensor2 vectors;                   // |V| x F

    int dim() const { return int(vectors.cols); }
    int lookup(const std::string& word) const {
        auto it = vocab.find(word);
        return it == vocab.end() ? -1 : it->second;
    }
};

struct CbowConfig {
    int dim = 100;
    int window = 2;
    int batch = 512;
    int epochs = 30;
    int min_count = 1;
    int negatives = 5;
    double lr = 0.05;
};

/// Negative-sampling CBoW over the corpus review texts; deterministic per seed.
EmbeddingTable train_cbow(const Corpus& corpus, const CbowConfig& config,
                          std::uint64_t seed);

/// Text format: one "word v1 ... vF" per line; '#' lines are ignored;
/// duplicate words keep the last occurrence with a warning on stderr.
EmbeddingTable load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingTable& table, const std::string& path);

}  // namespace groupsleuth
