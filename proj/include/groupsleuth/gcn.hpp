#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "groupsleuth/layers.hpp"
#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

/// Symmetric renormalization: C~ = C + I, D~_ii = sum_j C~_ij,
/// C^ = D~^{-1/2} C~ D~^{-1/2}.
template <typename T>
Tensor<T> normalize_adjacency(const Tensor<T>& c) {
    if (c.rows != c.cols) throw std::runtime_error("normalize_adjacency: non-square matrix");
    std::size_t n = c.rows;
    Tensor<T> ct = c;
    for (std::size_t i = 0; i < n; ++i) ct(i, i) += T(1);
    std::vector<T> dinv(n);
    for (std::size_t i = 0; i < n; ++i) {
        T s = 0;
        for (std::size_t j = 0; j < n; ++j) s += ct(i, j);
        dinv[i] = T(1) / std::sqrt(s);
    }
    Tensor<T> out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = dinv[i] * ct(i, j) * dinv[j];
    return out;
}

/// Two-layer GCN: softmax(C^ . ReLU(C^ V W0) W1).
template <typename T>
struct GcnModelT {
    std::size_t in_dim = 101, hidden = 16, classes = 2;
    std::vector<T> W0;  // in_dim x hidden
    std::vector<T> W1;  // hidden x classes

    GcnModelT() = default;
    GcnModelT(std::size_t in, std::size_t hid, std::size_t cls = 2)
        : in_dim(in), hidden(hid), classes(cls), W0(in * hid, T(0)), W1(hid * cls, T(0)) {}

    // W1 stays zero so an untrained model outputs uniform rows.
    void init_params(std::mt19937& rng) {
        std::normal_distribution<double> d(0.0, 1.0);
        T scale = T(1) / std::sqrt(T(in_dim));
        for (auto& x : W0) x = static_cast<T>(d(rng)) * scale;
    }

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        f(prefix + ".w0", W0, in_dim, hidden);
        f(prefix + ".w1", W1, hidden, classes);
    }
};

using GcnModel = GcnModelT<float>;

template <typename T>
struct GcnForward {
    Tensor<T> a1;      // C^ V            (n x in)
    Tensor<T> pre;     // C^ V W0         (n x hidden), pre-ReLU
    Tensor<T> hidden;  // ReLU(pre)
    Tensor<T> a2;      // C^ hidden
    Tensor<T> probs;   // softmax(C^ hidden W1)   (n x classes)
};

template <typename T>
GcnForward<T> gcn_forward(const GcnModelT<T>& m, const Tensor<T>& v, const Tensor<T>& chat) {
    if (v.cols != m.in_dim || chat.rows != v.rows || chat.cols != v.rows)
        throw std::runtime_error("gcn_forward: shape mismatch");
    GcnForward<T> fw;
    matmul(chat, v, fw.a1);
    Tensor<T> w0(m.in_dim, m.hidden);
    w0.data = m.W0;
    matmul(fw.a1, w0, fw.pre);
    fw.hidden = fw.pre;
    for (auto& x : fw.hidden.data) x = std::max(x, T(0));
    matmul(chat, fw.hidden, fw.a2);
    Tensor<T> w1(m.hidden, m.classes);
    w1.data = m.W1;
    matmul(fw.a2, w1, fw.probs);
    for (std::size_t i = 0; i < fw.probs.rows; ++i)
        softmax_row(&fw.probs.data[i * fw.probs.cols], fw.probs.cols);
    return fw;
}

/// Cross-entropy over labeled rows (label < 0 means unlabeled) scaled by
/// `weight`; parameter gradients are accumulated into `g`. Returns the
/// weighted loss contribution.
template <typename T>
double gcn_backward(const GcnModelT<T>& m, const Tensor<T>& v, const Tensor<T>& chat,
                    const GcnForward<T>& fw, const std::vector<int>& labels, double weight,
                    GcnModelT<T>& g) {
    std::size_t n = v.rows;
    Tensor<T> dlogits(n, m.classes);
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int y = labels[i];
        if (y < 0) continue;
        double p = std::max(double(fw.probs(i, std::size_t(y))), kProbClamp);
        loss += -std::log(p) * weight;
        for (std::size_t c = 0; c < m.classes; ++c)
            dlogits(i, c) = static_cast<T>(
                (double(fw.probs(i, c)) - (std::size_t(y) == c ? 1.0 : 0.0)) * weight);
    }
    Tensor<T> dW1 = matmul_tn(fw.a2, dlogits);
    for (std::size_t k = 0; k < dW1.data.size(); ++k) g.W1[k] += dW1.data[k];
    Tensor<T> w1t(m.classes, m.hidden);
    for (std::size_t i = 0; i < m.hidden; ++i)
        for (std::size_t j = 0; j < m.classes; ++j) w1t(j, i) = m.W1[i * m.classes + j];
    Tensor<T> da2 = matmul(dlogits, w1t);
    Tensor<T> dhidden = matmul(chat, da2);  // chat is symmetric
    for (std::size_t k = 0; k < dhidden.data.size(); ++k)
        if (fw.pre.data[k] <= T(0)) dhidden.data[k] = T(0);
    Tensor<T> dW0 = matmul_tn(fw.a1, dhidden);
    for (std::size_t k = 0; k < dW0.data.size(); ++k) g.W0[k] += dW0.data[k];
    return loss;
}

/// One group's inputs for GCN training/refinement.
struct GcnGroupData {
    Tensor2 features;        // n x 101 reviewer vectors
    Tensor2 chat;            // normalized forecast adjacency
    std::vector<int> labels; // 0 genuine, 1 fraudster, -1 unlabeled
};

struct GcnTrainConfig {
    double lr = 1e-5;
    int epochs = 100;
    std::size_t hidden = 16;
    bool verbose = false;
};

GcnModel train_gcn(const std::vector<GcnGroupData>& groups, const GcnTrainConfig& config,
                   std::uint64_t seed);

/// Training-set reviewer accuracy of a trained model.
double gcn_accuracy(const GcnModel& model, const std::vector<GcnGroupData>& groups);

}  // namespace groupsleuth
