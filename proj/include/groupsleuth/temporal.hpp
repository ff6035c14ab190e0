#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "groupsleuth/layers.hpp"

namespace groupsleuth {

/// Per-group collaboration sequence in roster-local coordinates; one n*n
/// symmetric 0/1 slice per window.
struct TemporalExample {
    int n = 0;
    std::vector<std::vector<std::uint8_t>> slices;
};

/// Logistic recurrence h_t = sig(W_h h_{t-1} + W_C vec(C_t) + b), with a
/// tanh output head mapped to [0,1] edge probabilities. The pipeline runs the
/// float instantiation; gradient checks use double.
template <typename T>
struct TemporalModelT {
    int m_max = 32;
    int hidden = 64;
    std::vector<T> Wh;  // hidden x hidden
    std::vector<T> Wc;  // hidden x m_max^2
    std::vector<T> bh;  // hidden
    Linear<T> head;     // hidden -> m_max^2, zero-initialized
    bool trained = false;

    TemporalModelT() = default;
    TemporalModelT(int m_max_, int hidden_)
        : m_max(m_max_), hidden(hidden_),
          Wh(std::size_t(hidden_) * std::size_t(hidden_), T(0)),
          Wc(std::size_t(hidden_) * std::size_t(m_max_) * std::size_t(m_max_), T(0)),
          bh(std::size_t(hidden_), T(0)),
          head(std::size_t(hidden_), std::size_t(m_max_) * std::size_t(m_max_)) {}

    void init_params(std::mt19937& rng) {
        std::normal_distribution<double> d(0.0, 1.0);
        T sh = T(1) / std::sqrt(T(hidden));
        for (auto& x : Wh) x = static_cast<T>(d(rng)) * sh;
        T sc = T(1) / T(m_max);
        for (auto& x : Wc) x = static_cast<T>(d(rng)) * sc;
        // head stays zero so an untrained model emits 0.5 everywhere
    }

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        f(prefix + ".Wh", Wh, std::size_t(hidden), std::size_t(hidden));
        f(prefix + ".Wc", Wc, std::size_t(hidden), std::size_t(m_max) * std::size_t(m_max));
        f(prefix + ".bh", bh, std::size_t(hidden), 1);
        head.visit(prefix + ".head", f);
    }
};

using TemporalModel = TemporalModelT<float>;

namespace temporal_detail {

constexpr double kEps = 1e-7;

// Embed a roster-local n*n slice into the fixed m_max^2 input vector.
template <typename T>
void embed_slice(const std::vector<std::uint8_t>& slice, int n, int m_max, std::vector<T>& out) {
    out.assign(std::size_t(m_max) * std::size_t(m_max), T(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out[std::size_t(i) * std::size_t(m_max) + std::size_t(j)] =
                T(slice[std::size_t(i) * std::size_t(n) + std::size_t(j)]);
}

inline int first_nonempty(const TemporalExample& ex) {
    for (int t = 0; t < int(ex.slices.size()); ++t)
        for (auto b : ex.slices[std::size_t(t)])
            if (b) return t;
    return int(ex.slices.size());
}

template <typename T>
struct StepCache {
    std::vector<T> c;  // embedded input
    std::vector<T> h;
};

template <typename T>
void recurrence_forward(const TemporalModelT<T>& m, const TemporalExample& ex, int from,
                        std::vector<StepCache<T>>& steps) {
    std::size_t msq = std::size_t(m.m_max) * std::size_t(m.m_max);
    std::vector<T> h(std::size_t(m.hidden), T(0)), a;
    for (int t = from; t < int(ex.slices.size()); ++t) {
        StepCache<T> sc;
        embed_slice(ex.slices[std::size_t(t)], ex.n, m.m_max, sc.c);
        matvec(m.Wh, std::size_t(m.hidden), std::size_t(m.hidden), h, a);
        std::vector<T> ac;
        matvec(m.Wc, std::size_t(m.hidden), msq, sc.c, ac);
        for (int i = 0; i < m.hidden; ++i)
            h[std::size_t(i)] =
                sigmoid(a[std::size_t(i)] + ac[std::size_t(i)] + m.bh[std::size_t(i)]);
        sc.h = h;
        steps.push_back(std::move(sc));
    }
}

// (tanh + 1)/2 probabilities from a hidden state.
template <typename T>
std::vector<T> head_probs(const TemporalModelT<T>& m, const std::vector<T>& h) {
    auto u = m.head.forward(h);
    for (auto& x : u) x = (std::tanh(x) + T(1)) * T(0.5);
    return u;
}

}  // namespace temporal_detail

/// Full-batch next-step BCE over the roster-block upper triangles; windows
/// before a group's first non-empty slice are skipped, as are groups with
/// fewer than two usable windows. When `grads` is non-null the mean-scaled
/// gradients are accumulated into it. Returns (summed loss, predicted bits).
template <typename T>
std::pair<double, long long> temporal_loss_and_grads(const TemporalModelT<T>& model,
                                                     const std::vector<TemporalExample>& examples,
                                                     TemporalModelT<T>* grads) {
    using temporal_detail::StepCache;
    std::size_t msq = std::size_t(model.m_max) * std::size_t(model.m_max);
    int hidden = model.hidden;

    struct Item {
        const TemporalExample* ex;
        int from;
    };
    std::vector<Item> items;
    long long count = 0;
    for (const auto& ex : examples) {
        int from = temporal_detail::first_nonempty(ex);
        int steps = int(ex.slices.size()) - from - 1;
        if (steps >= 1 && ex.n >= 2) {
            items.push_back({&ex, from});
            count += (long long)steps * ex.n * (ex.n - 1) / 2;
        }
    }
    if (count == 0) return {0.0, 0};

    double loss = 0;
    for (const auto& it : items) {
        const auto& ex = *it.ex;
        std::vector<StepCache<T>> fw;
        temporal_detail::recurrence_forward(model, ex, it.from, fw);
        int T_steps = int(fw.size());
        std::vector<std::vector<T>> du{std::size_t(T_steps)};
        for (int t = 0; t + 1 < T_steps; ++t) {
            auto p = temporal_detail::head_probs(model, fw[std::size_t(t)].h);
            const auto& target = ex.slices[std::size_t(it.from + t + 1)];
            du[std::size_t(t)].assign(msq, T(0));
            for (int i = 0; i < ex.n; ++i)
                for (int j = i + 1; j < ex.n; ++j) {
                    std::size_t k = std::size_t(i) * std::size_t(model.m_max) + std::size_t(j);
                    double pp = std::min(std::max(double(p[k]), temporal_detail::kEps),
                                         1.0 - temporal_detail::kEps);
                    double y = target[std::size_t(i) * std::size_t(ex.n) + std::size_t(j)];
                    loss += -(y * std::log(pp) + (1 - y) * std::log(1 - pp));
                    // d(bce)/d(head pre-activation) = 2 (p - y)
                    du[std::size_t(t)][k] = static_cast<T>(2.0 * (pp - y) / double(count));
                }
        }
        if (!grads) continue;
        // Backward through the head and the logistic recurrence.
        std::vector<T> da_next(std::size_t(hidden), T(0)), dh, tmp;
        const std::vector<T> h0(std::size_t(hidden), T(0));
        for (int t = T_steps - 1; t >= 0; --t) {
            dh.assign(std::size_t(hidden), T(0));
            if (t + 1 < T_steps) {
                matvec_t(model.Wh, std::size_t(hidden), std::size_t(hidden), da_next, tmp);
                for (int i = 0; i < hidden; ++i) dh[std::size_t(i)] += tmp[std::size_t(i)];
            }
            if (!du[std::size_t(t)].empty()) {
                model.head.backward(fw[std::size_t(t)].h, du[std::size_t(t)], grads->head, tmp);
                for (int i = 0; i < hidden; ++i) dh[std::size_t(i)] += tmp[std::size_t(i)];
            }
            std::vector<T> da{std::vector<T>(std::size_t(hidden), T(0))};
            for (int i = 0; i < hidden; ++i) {
                T h = fw[std::size_t(t)].h[std::size_t(i)];
                da[std::size_t(i)] = dh[std::size_t(i)] * h * (T(1) - h);
            }
            const std::vector<T>& h_prev = t > 0 ? fw[std::size_t(t - 1)].h : h0;
            outer_acc(grads->Wh, da, h_prev);
            outer_acc(grads->Wc, da, fw[std::size_t(t)].c);
            for (int i = 0; i < hidden; ++i) grads->bh[std::size_t(i)] += da[std::size_t(i)];
            da_next = da;
        }
    }
    return {loss, count};
}

struct TemporalTrainConfig {
    double lr = 1e-4;
    int epochs = 300;
    double clip_norm = 5.0;
    int m_max = 32;
    int hidden = 64;
    bool verbose = false;
};

/// Next-step prediction with BCE over the roster-block upper triangle.
TemporalModel train_temporal(const std::vector<TemporalExample>& examples,
                             const TemporalTrainConfig& config, std::uint64_t seed);

/// Edge probabilities for window N+1 after consuming the full timeline;
/// n*n matrix in roster order, symmetric with zero diagonal.
std::vector<float> forecast_probs(const TemporalModel& model, const TemporalExample& ex);

/// Thresholded forecast: edge iff probability >= 0.5.
std::vector<std::uint8_t> forecast(const TemporalModel& model, const TemporalExample& ex);

/// Mean next-step BCE of a trained model over a set of timelines.
double temporal_mean_bce(const TemporalModel& model, const std::vector<TemporalExample>& examples);

}  // namespace groupsleuth
