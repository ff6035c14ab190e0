#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groupsleuth/corpus.hpp"

namespace groupsleuth {

struct SynthConfig {
    int n_fraud_groups = 1;
    int n_genuine_groups = 1;
    int group_size_min = 3;
    int group_size_max = 8;
    int n_windows = 4;
    int window_len_days = 28;
    double camouflage_rate = 0.0;  // fraudsters co-reviewing with genuine groups
    double outlier_rate = 0.0;     // genuine reviewers inserted into fraud groups
    int fraud_vocab = 40;          // words per topic pool
    int genuine_vocab = 40;
    double fraud_low_rating_rate = 0.5;  // fraction of fraud events rated 1 (rest 5)
    int solo_reviews_min = 2;
    int solo_reviews_max = 4;
};

struct PlantedGroup {
    std::string group_id;
    std::vector<std::string> members;
    bool fraud = false;
};

struct GroundTruth {
    std::vector<PlantedGroup> groups;
};

struct SynthResult {
    Corpus corpus;
    GroundTruth truth;
};

/// Plants fraud and genuine co-review groups with separated topic vocabularies
/// and emits the corpus plus the ground-truth membership sidecar. Every
/// planted group shares at least one (item, rating) event inside one window;
/// deterministic per seed.
SynthResult generate_synthetic(const SynthConfig& config, std::uint64_t seed);

void write_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

}  // namespace groupsleuth
