#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "groupsleuth/layers.hpp"
#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

enum class OrderStrategy { bfs_maxdeg, given };

/// BFS order from the highest-degree node, ties by index; unvisited
/// components are entered at their highest-degree node in turn.
std::vector<int> order_nodes(const std::vector<std::uint8_t>& adj, int n,
                             OrderStrategy strategy = OrderStrategy::bfs_maxdeg,
                             const std::vector<int>* given = nullptr);

using CollabSequence = std::vector<std::vector<std::uint8_t>>;  // S_i has length i-1

CollabSequence to_sequence(const std::vector<std::uint8_t>& adj, int n,
                           const std::vector<int>& pi);
std::vector<std::uint8_t> from_sequence(const CollabSequence& seq, const std::vector<int>& pi);

/// One (group, window) training slice: roster-order adjacency plus per-member
/// representation vectors for that window.
struct SpatialExample {
    int n = 0;
    std::vector<std::uint8_t> adj;           // n*n, symmetric, zero diagonal
    std::vector<std::vector<float>> reps;    // n vectors of rep_dim
};

/// Graph-state GRU (f1) feeding an edge-level GRU (f2) that emits one
/// Bernoulli collaboration bit at a time.
struct HinRnnModel {
    int m_max = 32;
    int rep_dim = 101;
    int graph_hidden = 128;
    int edge_hidden = 16;
    GruCell<float> f1;
    GruCell<float> f2;
    Linear<float> proj;  // graph hidden -> edge-GRU initial state
    Linear<float> out;   // edge hidden -> edge logit
    bool trained = false;

    HinRnnModel() = default;
    HinRnnModel(int m_max_, int rep_dim_, int graph_hidden_ = 128, int edge_hidden_ = 16);
    void init_params(std::mt19937& rng);

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        f1.visit(prefix + ".f1", f);
        f2.visit(prefix + ".f2", f);
        proj.visit(prefix + ".proj", f);
        out.visit(prefix + ".out", f);
    }
};

struct SpatialTrainConfig {
    double lr = 0.003;
    int epochs = 3000;   // minibatches drawn per training run
    int batch = 32;
    double clip_norm = 5.0;
    int m_max = 32;
    int rep_dim = 101;
    bool verbose = false;
};

/// Teacher-forced edge probabilities of a slice under its canonical ordering.
/// Returns (summed BCE over edges in nats, edge count).
std::pair<double, int> hinrnn_slice_loss(const HinRnnModel& model, const SpatialExample& ex);

/// Per-edge conditional log-likelihoods of the observed bits, in emission order.
std::vector<double> hinrnn_edge_loglik(const HinRnnModel& model, const SpatialExample& ex);

HinRnnModel train_hinrnn(const std::vector<SpatialExample>& examples,
                         const SpatialTrainConfig& config, std::uint64_t seed);

/// Autoregressive regeneration of one slice; edge kept iff probability >= 0.5.
/// Output is symmetric, zero-diagonal, in the example's roster order.
std::vector<std::uint8_t> refine_slice(const HinRnnModel& model, const SpatialExample& ex);

/// Mean teacher-forced edge BCE over a set of slices.
double hinrnn_mean_edge_bce(const HinRnnModel& model, const std::vector<SpatialExample>& examples);

}  // namespace groupsleuth
