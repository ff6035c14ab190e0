#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "groupsleuth/layers.hpp"
#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

struct ClusterOutcome {
    std::vector<int> assignment;      // member -> {0,1}
    Tensor2 centroids;                // 2 x d (or 1 x d for degenerate inputs)
    std::vector<double> tss, wss, bss;  // per dimension
    double bss_norm = 0.0;            // (1/n) sqrt(sum_i bss_i)
    bool mixed = false;               // bss_norm >= 0.5
    int dominant = 0;                 // larger cluster; ties to the cluster
                                      // holding the lowest-index member
};

/// 2-means with k-means++ seeding and Lloyd iterations, followed by the
/// TSS/WSS/BSS mixed-group gate.
ClusterOutcome kmeans2(const Tensor2& points, std::uint64_t seed, int max_iter = 100);

/// Same gate with per-dimension median centroids and L1 assignment.
ClusterOutcome kmedians2(const Tensor2& points, std::uint64_t seed, int max_iter = 100);

enum class RemovalStrategy { kmeans, kmedians, gmm_mahalanobis, centroid_threshold, min_connection };

RemovalStrategy parse_strategy(const std::string& name);
std::string strategy_name(RemovalStrategy s);

/// Kept member indices (never empty). `adjacency` is only consulted by
/// min_connection and may be empty otherwise.
std::vector<int> remove_outliers(RemovalStrategy strategy, const Tensor2& points,
                                 const std::vector<std::uint8_t>& adjacency,
                                 std::uint64_t seed, double centroid_theta = 1.5);

/// Element-wise mean over the kept members' representations.
std::vector<float> group_vector(const Tensor2& points, const std::vector<int>& kept);

/// Single affine layer with logistic output.
struct FcModel {
    Linear<float> layer;
    bool fallback = false;   // single-class training set
    float fallback_score = 0.f;
    int in_dim = 0;

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        layer.visit(prefix + ".fc", f);
    }

    float score(const std::vector<float>& v) const;
};

struct FcTrainConfig {
    double lr = 1e-3;
    int epochs = 200;
};

FcModel train_fc(const std::vector<std::vector<float>>& vectors, const std::vector<int>& labels,
                 const FcTrainConfig& config, std::uint64_t seed);

struct GroupVerdict {
    std::string group_id;
    std::vector<int> kept;   // roster-local indices
    std::vector<float> gvec; // group-level representation
    float score = 0.f;       // fraud probability
    bool fraud = false;      // score >= 0.5
    double bss_norm = 0.0;
    bool mixed = false;
    std::string strategy;
};

}  // namespace groupsleuth
