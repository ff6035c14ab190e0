#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

constexpr double kProbClamp = 1e-7;

/// GRU cell with hand-derived gradients.
///   z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br)
///   c = tanh(Wc x + Uc (r*h) + bc)
///   h' = (1-z)*h + z*c
template <typename T>
struct GruCell {
    std::size_t in = 0, hid = 0;
    std::vector<T> Wz, Wr, Wc;  // hid x in
    std::vector<T> Uz, Ur, Uc;  // hid x hid
    std::vector<T> bz, br, bc;  // hid

    GruCell() = default;
    GruCell(std::size_t input_dim, std::size_t hidden_dim)
        : in(input_dim), hid(hidden_dim),
          Wz(hid * in, T(0)), Wr(hid * in, T(0)), Wc(hid * in, T(0)),
          Uz(hid * hid, T(0)), Ur(hid * hid, T(0)), Uc(hid * hid, T(0)),
          bz(hid, T(0)), br(hid, T(0)), bc(hid, T(0)) {}

    void init(std::mt19937& rng, T scale) {
        std::normal_distribution<double> d(0.0, 1.0);
        for (auto* v : {&Wz, &Wr, &Wc, &Uz, &Ur, &Uc})
            for (auto& x : *v) x = static_cast<T>(d(rng)) * scale;
    }

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        f(prefix + ".Wz", Wz, hid, in);
        f(prefix + ".Wr", Wr, hid, in);
        f(prefix + ".Wc", Wc, hid, in);
        f(prefix + ".Uz", Uz, hid, hid);
        f(prefix + ".Ur", Ur, hid, hid);
        f(prefix + ".Uc", Uc, hid, hid);
        f(prefix + ".bz", bz, hid, 1);
        f(prefix + ".br", br, hid, 1);
        f(prefix + ".bc", bc, hid, 1);
    }

    struct Cache {
        std::vector<T> x, h_prev, z, r, c, rh;
    };

    std::vector<T> forward(const std::vector<T>& x, const std::vector<T>& h_prev,
                           Cache* cache = nullptr) const {
        if (x.size() != in || h_prev.size() != hid)
            throw std::runtime_error("gru_step: shape mismatch");
        std::vector<T> az, ar, ac, tmp;
        matvec(Wz, hid, in, x, az);
        matvec(Uz, hid, hid, h_prev, tmp);
        std::vector<T> z(hid), r(hid), c(hid), rh(hid), h(hid);
        for (std::size_t i = 0; i < hid; ++i) z[i] = sigmoid(az[i] + tmp[i] + bz[i]);
        matvec(Wr, hid, in, x, ar);
        matvec(Ur, hid, hid, h_prev, tmp);
        for (std::size_t i = 0; i < hid; ++i) r[i] = sigmoid(ar[i] + tmp[i] + br[i]);
        for (std::size_t i = 0; i < hid; ++i) rh[i] = r[i] * h_prev[i];
        matvec(Wc, hid, in, x, ac);
        matvec(Uc, hid, hid, rh, tmp);
        for (std::size_t i = 0; i < hid; ++i) c[i] = std::tanh(ac[i] + tmp[i] + bc[i]);
        for (std::size_t i = 0; i < hid; ++i)
            h[i] = (T(1) - z[i]) * h_prev[i] + z[i] * c[i];
        if (cache) *cache = Cache{x, h_prev, z, r, c, rh};
        return h;
    }

    // Accumulates parameter gradients into `g`; returns gradients w.r.t. the
    // step inputs through dx and dh_prev.
    void backward(const Cache& k, const std::vector<T>& dh, GruCell<T>& g,
                  std::vector<T>& dx, std::vector<T>& dh_prev) const {
        std::vector<T> daz(hid), dar(hid), dac(hid), drh(hid), tmp;
        dx.assign(in, T(0));
        dh_prev.assign(hid, T(0));
        for (std::size_t i = 0; i < hid; ++i) {
            T dz = dh[i] * (k.c[i] - k.h_prev[i]);
            daz[i] = dz * k.z[i] * (T(1) - k.z[i]);
            T dc = dh[i] * k.z[i];
            dac[i] = dc * (T(1) - k.c[i] * k.c[i]);
            dh_prev[i] += dh[i] * (T(1) - k.z[i]);
        }
        matvec_t(Uc, hid, hid, dac, drh);
        for (std::size_t i = 0; i < hid; ++i) {
            T dr = drh[i] * k.h_prev[i];
            dar[i] = dr * k.r[i] * (T(1) - k.r[i]);
            dh_prev[i] += drh[i] * k.r[i];
        }
        matvec_t(Uz, hid, hid, daz, tmp);
        for (std::size_t i = 0; i < hid; ++i) dh_prev[i] += tmp[i];
        matvec_t(Ur, hid, hid, dar, tmp);
        for (std::size_t i = 0; i < hid; ++i) dh_prev[i] += tmp[i];

        matvec_t(Wz, hid, in, daz, tmp);
        for (std::size_t i = 0; i < in; ++i) dx[i] += tmp[i];
        matvec_t(Wr, hid, in, dar, tmp);
        for (std::size_t i = 0; i < in; ++i) dx[i] += tmp[i];
        matvec_t(Wc, hid, in, dac, tmp);
        for (std::size_t i = 0; i < in; ++i) dx[i] += tmp[i];

        outer_acc(g.Wz, daz, k.x);
        outer_acc(g.Wr, dar, k.x);
        outer_acc(g.Wc, dac, k.x);
        outer_acc(g.Uz, daz, k.h_prev);
        outer_acc(g.Ur, dar, k.h_prev);
        outer_acc(g.Uc, dac, k.rh);
        for (std::size_t i = 0; i < hid; ++i) {
            g.bz[i] += daz[i];
            g.br[i] += dar[i];
            g.bc[i] += dac[i];
        }
    }
};

/// Affine layer y = W x + b.
template <typename T>
struct Linear {
    std::size_t in = 0, out = 0;
    std::vector<T> W;  // out x in
    std::vector<T> b;  // out

    Linear() = default;
    Linear(std::size_t input_dim, std::size_t output_dim)
        : in(input_dim), out(output_dim), W(out * in, T(0)), b(out, T(0)) {}

    void init(std::mt19937& rng, T scale) {
        std::normal_distribution<double> d(0.0, 1.0);
        for (auto& x : W) x = static_cast<T>(d(rng)) * scale;
    }

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        f(prefix + ".W", W, out, in);
        f(prefix + ".b", b, out, 1);
    }

    std::vector<T> forward(const std::vector<T>& x) const {
        if (x.size() != in) throw std::runtime_error("linear: shape mismatch");
        std::vector<T> y;
        matvec(W, out, in, x, y);
        for (std::size_t i = 0; i < out; ++i) y[i] += b[i];
        return y;
    }

    void backward(const std::vector<T>& x, const std::vector<T>& dy, Linear<T>& g,
                  std::vector<T>& dx) const {
        outer_acc(g.W, dy, x);
        for (std::size_t i = 0; i < out; ++i) g.b[i] += dy[i];
        matvec_t(W, out, in, dy, dx);
    }
};

/// Mean-reduced binary cross entropy; predictions clamped to [1e-7, 1-1e-7].
template <typename T>
double bce(const std::vector<T>& pred, const std::vector<T>& target) {
    if (pred.size() != target.size()) throw std::runtime_error("bce: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double p = std::min(std::max(double(pred[i]), kProbClamp), 1.0 - kProbClamp);
        double y = target[i];
        s += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return s / double(pred.size());
}

/// dL/dpred for mean-reduced BCE.
template <typename T>
std::vector<T> bce_grad(const std::vector<T>& pred, const std::vector<T>& target) {
    std::vector<T> g(pred.size());
    double n = double(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double p = std::min(std::max(double(pred[i]), kProbClamp), 1.0 - kProbClamp);
        double y = target[i];
        g[i] = static_cast<T>((p - y) / (p * (1.0 - p)) / n);
    }
    return g;
}

template <typename T>
void softmax_row(T* x, std::size_t n) {
    T mx = x[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
    T s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - mx);
        s += x[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= s;
}

/// Mean-reduced cross entropy between softmax rows and one-hot rows.
template <typename T>
double cross_entropy(const Tensor<T>& softmax_rows, const Tensor<T>& one_hot) {
    if (softmax_rows.rows != one_hot.rows || softmax_rows.cols != one_hot.cols)
        throw std::runtime_error("cross_entropy: shape mismatch");
    double s = 0;
    for (std::size_t i = 0; i < softmax_rows.rows; ++i)
        for (std::size_t j = 0; j < softmax_rows.cols; ++j)
            if (one_hot(i, j) > 0) {
                double p = std::max(double(softmax_rows(i, j)), kProbClamp);
                s += -double(one_hot(i, j)) * std::log(p);
            }
    return s / double(softmax_rows.rows);
}

}  // namespace groupsleuth
