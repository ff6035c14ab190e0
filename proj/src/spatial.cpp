#include "groupsleuth/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "groupsleuth/optim.hpp"

namespace groupsleuth {

std::vector<int> order_nodes(const std::vector<std::uint8_t>& adj, int n,
                             OrderStrategy strategy, const std::vector<int>* given) {
    if (n <= 0) throw std::runtime_error("order_nodes: empty roster");
    if (strategy == OrderStrategy::given) {
        if (!given || int(given->size()) != n)
            throw std::runtime_error("order_nodes: bad given permutation");
        return *given;
    }
    std::vector<int> degree(std::size_t(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adj[std::size_t(i) * std::size_t(n) + std::size_t(j)]) ++degree[std::size_t(i)];
    std::vector<bool> seen(std::size_t(n), false);
    std::vector<int> order;
    auto next_root = [&]() {
        int best = -1;
        for (int i = 0; i < n; ++i)
            if (!seen[std::size_t(i)] &&
                (best < 0 || degree[std::size_t(i)] > degree[std::size_t(best)]))
                best = i;
        return best;
    };
    while (int(order.size()) < n) {
        int root = next_root();
        std::deque<int> queue{root};
        seen[std::size_t(root)] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            order.push_back(u);
            for (int v = 0; v < n; ++v)
                if (adj[std::size_t(u) * std::size_t(n) + std::size_t(v)] && !seen[std::size_t(v)]) {
                    seen[std::size_t(v)] = true;
                    queue.push_back(v);
                }
        }
    }
    return order;
}

CollabSequence to_sequence(const std::vector<std::uint8_t>& adj, int n,
                           const std::vector<int>& pi) {
    if (int(pi.size()) != n) throw std::runtime_error("to_sequence: permutation length mismatch");
    CollabSequence seq{std::size_t(n)};
    for (int i = 0; i < n; ++i) {
        seq[std::size_t(i)].resize(std::size_t(i));
        for (int j = 0; j < i; ++j)
            seq[std::size_t(i)][std::size_t(j)] =
                adj[std::size_t(pi[std::size_t(j)]) * std::size_t(n) + std::size_t(pi[std::size_t(i)])];
    }
    return seq;
}

std::vector<std::uint8_t> from_sequence(const CollabSequence& seq, const std::vector<int>& pi) {
    int n = int(seq.size());
    if (int(pi.size()) != n) throw std::runtime_error("from_sequence: permutation length mismatch");
    for (int i = 0; i < n; ++i)
        if (int(seq[std::size_t(i)].size()) != i)
            throw std::runtime_error("from_sequence: bad sequence lengths");
    std::vector<std::uint8_t> adj(std::size_t(n) * std::size_t(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (seq[std::size_t(i)][std::size_t(j)]) {
                adj[std::size_t(pi[std::size_t(j)]) * std::size_t(n) + std::size_t(pi[std::size_t(i)])] = 1;
                adj[std::size_t(pi[std::size_t(i)]) * std::size_t(n) + std::size_t(pi[std::size_t(j)])] = 1;
            }
    return adj;
}

HinRnnModel::HinRnnModel(int m_max_, int rep_dim_, int graph_hidden_, int edge_hidden_)
    : m_max(m_max_), rep_dim(rep_dim_), graph_hidden(graph_hidden_), edge_hidden(edge_hidden_),
      f1(std::size_t(m_max_ - 1 + rep_dim_), std::size_t(graph_hidden_)),
      f2(1, std::size_t(edge_hidden_)),
      proj(std::size_t(graph_hidden_), std::size_t(edge_hidden_)),
      out(std::size_t(edge_hidden_), 1) {}

void HinRnnModel::init_params(std::mt19937& rng) {
    f1.init(rng, 1.f / std::sqrt(float(f1.in + f1.hid)));
    f2.init(rng, 1.f / std::sqrt(float(f2.hid)));
    proj.init(rng, 1.f / std::sqrt(float(proj.in)));
    out.init(rng, 1.f / std::sqrt(float(out.in)));
}

namespace {

struct SliceForward {
    std::vector<int> pi;
    CollabSequence seq;                       // observed (teacher) or generated bits
    std::vector<GruCell<float>::Cache> f1_cache;   // per node
    std::vector<std::vector<float>> h;             // per node graph state
    std::vector<std::vector<GruCell<float>::Cache>> f2_cache;  // [i][j]
    std::vector<std::vector<std::vector<float>>> g;            // [i][j] edge states
    std::vector<std::vector<float>> g0;                        // [i] projected init
    std::vector<std::vector<float>> logits;                    // [i][j]
};

// One pass over a slice. When generate is true the edge inputs are the
// model's own thresholded emissions instead of the observed sequence.
SliceForward run_slice(const HinRnnModel& model, const SpatialExample& ex, bool generate,
                       bool keep_caches) {
    int n = ex.n;
    if (n < 1 || int(ex.reps.size()) != n)
        throw std::runtime_error("hinrnn: bad example");
    if (n > model.m_max) throw std::runtime_error("hinrnn: roster exceeds M_max");
    SliceForward fw;
    fw.pi = order_nodes(ex.adj, n);
    fw.seq = to_sequence(ex.adj, n, fw.pi);
    fw.f1_cache.resize(std::size_t(n));
    fw.h.resize(std::size_t(n));
    fw.f2_cache.resize(std::size_t(n));
    fw.g.resize(std::size_t(n));
    fw.g0.resize(std::size_t(n));
    fw.logits.resize(std::size_t(n));

    std::size_t pad = std::size_t(model.m_max - 1);
    std::vector<float> h_prev(std::size_t(model.graph_hidden), 0.f);
    for (int i = 0; i < n; ++i) {
        std::vector<float> x(pad + std::size_t(model.rep_dim), 0.f);
        if (i > 0) {
            const auto& prev = fw.seq[std::size_t(i - 1)];
            for (std::size_t k = 0; k < prev.size(); ++k) x[k] = float(prev[k]);
        }
        const auto& rep = ex.reps[std::size_t(fw.pi[std::size_t(i)])];
        if (rep.size() != std::size_t(model.rep_dim))
            throw std::runtime_error("hinrnn: rep dimension mismatch");
        std::copy(rep.begin(), rep.end(), x.begin() + long(pad));
        fw.h[std::size_t(i)] =
            model.f1.forward(x, h_prev, keep_caches ? &fw.f1_cache[std::size_t(i)] : nullptr);
        h_prev = fw.h[std::size_t(i)];

        if (i >= 1) {
            fw.g0[std::size_t(i)] = model.proj.forward(fw.h[std::size_t(i)]);
            std::vector<float> gstate = fw.g0[std::size_t(i)];
            fw.f2_cache[std::size_t(i)].resize(std::size_t(i));
            fw.g[std::size_t(i)].resize(std::size_t(i));
            fw.logits[std::size_t(i)].resize(std::size_t(i));
            float prev_bit = 1.f;  // start-of-row token
            for (int j = 0; j < i; ++j) {
                std::vector<float> xin{prev_bit};
                gstate = model.f2.forward(
                    xin, gstate, keep_caches ? &fw.f2_cache[std::size_t(i)][std::size_t(j)] : nullptr);
                fw.g[std::size_t(i)][std::size_t(j)] = gstate;
                float logit = model.out.forward(gstate)[0];
                fw.logits[std::size_t(i)][std::size_t(j)] = logit;
                if (generate)
                    fw.seq[std::size_t(i)][std::size_t(j)] = sigmoid(logit) >= 0.5f ? 1 : 0;
                prev_bit = float(fw.seq[std::size_t(i)][std::size_t(j)]);
            }
        }
    }
    return fw;
}

double slice_bce_sum(const SliceForward& fw) {
    double loss = 0;
    for (std::size_t i = 0; i < fw.logits.size(); ++i)
        for (std::size_t j = 0; j < fw.logits[i].size(); ++j) {
            double logit = fw.logits[i][j];
            double y = fw.seq[i][j];
            // softplus(logit) - y*logit, numerically stable
            double sp = logit > 0 ? logit + std::log1p(std::exp(-logit))
                                  : std::log1p(std::exp(logit));
            loss += sp - y * logit;
        }
    return loss;
}

int slice_edge_count(int n) { return n * (n - 1) / 2; }

// Accumulates parameter gradients for one slice; edge-BCE terms are scaled
// by `scale`.
void slice_backward(const HinRnnModel& model, const SpatialExample& ex, const SliceForward& fw,
                    double scale, HinRnnModel& grads) {
    int n = ex.n;
    std::vector<float> dh_next(std::size_t(model.graph_hidden), 0.f);
    std::vector<float> dh, dh_prev, dx, dg, dg_prev, dg_tmp;
    for (int i = n - 1; i >= 0; --i) {
        dh = dh_next;
        if (i >= 1) {
            std::vector<float> dg_next(std::size_t(model.edge_hidden), 0.f);
            for (int j = i - 1; j >= 0; --j) {
                float p = sigmoid(fw.logits[std::size_t(i)][std::size_t(j)]);
                float y = float(fw.seq[std::size_t(i)][std::size_t(j)]);
                std::vector<float> dlogit{float(scale) * (p - y)};
                model.out.backward(fw.g[std::size_t(i)][std::size_t(j)], dlogit, grads.out, dg_tmp);
                dg = dg_next;
                for (std::size_t k = 0; k < dg.size(); ++k) dg[k] += dg_tmp[k];
                model.f2.backward(fw.f2_cache[std::size_t(i)][std::size_t(j)], dg, grads.f2, dx,
                                  dg_prev);
                dg_next = dg_prev;
            }
            std::vector<float> dh_proj;
            model.proj.backward(fw.h[std::size_t(i)], dg_next, grads.proj, dh_proj);
            for (std::size_t k = 0; k < dh.size(); ++k) dh[k] += dh_proj[k];
        }
        model.f1.backward(fw.f1_cache[std::size_t(i)], dh, grads.f1, dx, dh_prev);
        dh_next = dh_prev;
    }
}

}  // namespace

std::pair<double, int> hinrnn_slice_loss(const HinRnnModel& model, const SpatialExample& ex) {
    auto fw = run_slice(model, ex, false, false);
    return {slice_bce_sum(fw), slice_edge_count(ex.n)};
}

std::vector<double> hinrnn_edge_loglik(const HinRnnModel& model, const SpatialExample& ex) {
    auto fw = run_slice(model, ex, false, false);
    std::vector<double> out;
    for (std::size_t i = 0; i < fw.logits.size(); ++i)
        for (std::size_t j = 0; j < fw.logits[i].size(); ++j) {
            double logit = fw.logits[i][j];
            double y = fw.seq[i][j];
            double sp = logit > 0 ? logit + std::log1p(std::exp(-logit))
                                  : std::log1p(std::exp(logit));
            out.push_back(-(sp - y * logit));
        }
    return out;
}

HinRnnModel train_hinrnn(const std::vector<SpatialExample>& examples,
                         const SpatialTrainConfig& cfg, std::uint64_t seed) {
    std::vector<int> usable;
    for (int i = 0; i < int(examples.size()); ++i)
        if (examples[std::size_t(i)].n >= 2) usable.push_back(i);
    if (usable.empty()) throw std::runtime_error("train_hinrnn: no trainable slices");
    int rep_dim = int(examples[std::size_t(usable[0])].reps[0].size());
    if (rep_dim != cfg.rep_dim)
        throw std::runtime_error("train_hinrnn: rep_dim mismatch with config");

    std::mt19937 rng{std::uint32_t(seed)};
    HinRnnModel model(cfg.m_max, cfg.rep_dim);
    model.init_params(rng);
    HinRnnModel grads(cfg.m_max, cfg.rep_dim);
    auto slots = bind_slots<float>(model, grads);
    Optimizer<float> opt(OptKind::adam, cfg.lr);

    std::vector<int> pool = usable;
    std::size_t cursor = pool.size();  // triggers initial shuffle
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> batch;
        for (int b = 0; b < cfg.batch; ++b) {
            if (cursor >= pool.size()) {
                std::shuffle(pool.begin(), pool.end(), rng);
                cursor = 0;
            }
            batch.push_back(pool[cursor++]);
        }
        int total_edges = 0;
        for (int idx : batch) total_edges += slice_edge_count(examples[std::size_t(idx)].n);
        if (total_edges == 0) continue;
        zero_grads(slots);
        double loss = 0;
        for (int idx : batch) {
            const auto& ex = examples[std::size_t(idx)];
            auto fw = run_slice(model, ex, false, true);
            loss += slice_bce_sum(fw);
            slice_backward(model, ex, fw, 1.0 / total_edges, grads);
        }
        clip_global_norm(slots, cfg.clip_norm);
        opt.step(slots);
        if (cfg.verbose && epoch % 200 == 0)
            std::cerr << "hinrnn epoch " << epoch << " mean edge bce "
                      << loss / total_edges << "\n";
    }
    model.trained = true;
    return model;
}

std::vector<std::uint8_t> refine_slice(const HinRnnModel& model, const SpatialExample& ex) {
    if (!model.trained) throw std::runtime_error("refine_slice: untrained model");
    auto fw = run_slice(model, ex, true, false);
    return from_sequence(fw.seq, fw.pi);
}

double hinrnn_mean_edge_bce(const HinRnnModel& model,
                            const std::vector<SpatialExample>& examples) {
    double loss = 0;
    long long edges = 0;
    for (const auto& ex : examples) {
        if (ex.n < 2) continue;
        auto [l, e] = hinrnn_slice_loss(model, ex);
        loss += l;
        edges += e;
    }
    return edges ? loss / double(edges) : 0.0;
}

}  // namespace groupsleuth
