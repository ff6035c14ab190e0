#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace groupsleuth {

template <typename T>
struct ParamSlot {
    std::vector<T>* param;
    std::vector<T>* grad;
};

/// Pairs the parameter vectors of a model with the matching vectors of a
/// same-shaped gradient accumulator.
template <typename T, typename Model>
std::vector<ParamSlot<T>> bind_slots(Model& model, Model& grads) {
    std::vector<std::vector<T>*> ps, gs;
    model.visit("m", [&](const std::string&, std::vector<T>& v, std::size_t, std::size_t) {
        ps.push_back(&v);
    });
    grads.visit("m", [&](const std::string&, std::vector<T>& v, std::size_t, std::size_t) {
        gs.push_back(&v);
    });
    std::vector<ParamSlot<T>> slots;
    for (std::size_t i = 0; i < ps.size(); ++i) slots.push_back({ps[i], gs[i]});
    return slots;
}

template <typename T>
void zero_grads(std::vector<ParamSlot<T>>& slots) {
    for (auto& s : slots) std::fill(s.grad->begin(), s.grad->end(), T(0));
}

/// Scales all gradients so their global L2 norm does not exceed max_norm.
template <typename T>
double clip_global_norm(std::vector<ParamSlot<T>>& slots, double max_norm) {
    double sq = 0;
    for (auto& s : slots)
        for (T v : *s.grad) sq += double(v) * double(v);
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0) {
        T scale = static_cast<T>(max_norm / norm);
        for (auto& s : slots)
            for (T& v : *s.grad) v *= scale;
    }
    return norm;
}

template <typename T>
void require_finite_grads(const std::vector<ParamSlot<T>>& slots) {
    for (const auto& s : slots)
        for (T v : *s.grad)
            if (!std::isfinite(double(v))) throw std::runtime_error("non-finite gradient");
}

enum class OptKind { sgd, adam };

/// SGD / Adam(0.9, 0.999, eps 1e-8) with bias correction.
template <typename T>
struct Optimizer {
    OptKind kind = OptKind::adam;
    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long t = 0;
    std::vector<std::vector<double>> m, v;

    Optimizer(OptKind k, double learning_rate) : kind(k), lr(learning_rate) {
        if (lr <= 0) throw std::runtime_error("optimizer: lr must be positive");
    }

    void step(std::vector<ParamSlot<T>>& slots) {
        require_finite_grads(slots);
        if (kind == OptKind::sgd) {
            for (auto& s : slots)
                for (std::size_t i = 0; i < s.param->size(); ++i)
                    (*s.param)[i] -= static_cast<T>(lr * double((*s.grad)[i]));
            return;
        }
        if (m.empty()) {
            for (auto& s : slots) {
                m.emplace_back(s.param->size(), 0.0);
                v.emplace_back(s.param->size(), 0.0);
            }
        }
        ++t;
        double bc1 = 1.0 - std::pow(beta1, double(t));
        double bc2 = 1.0 - std::pow(beta2, double(t));
        for (std::size_t k = 0; k < slots.size(); ++k) {
            auto& p = *slots[k].param;
            auto& g = *slots[k].grad;
            for (std::size_t i = 0; i < p.size(); ++i) {
                double gi = g[i];
                m[k][i] = beta1 * m[k][i] + (1 - beta1) * gi;
                v[k][i] = beta2 * v[k][i] + (1 - beta2) * gi * gi;
                double mh = m[k][i] / bc1, vh = v[k][i] / bc2;
                p[i] -= static_cast<T>(lr * mh / (std::sqrt(vh) + eps));
            }
        }
    }
};

}  // namespace groupsleuth
