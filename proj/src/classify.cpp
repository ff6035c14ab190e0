#include "groupsleuth/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "groupsleuth/optim.hpp"

namespace groupsleuth {

namespace {

double sq_dist(const Tensor2& pts, std::size_t i, const Tensor2& cent, std::size_t c) {
    double s = 0;
    for (std::size_t k = 0; k < pts.cols; ++k) {
        double d = double(pts(i, k)) - double(cent(c, k));
        s += d * d;
    }
    return s;
}

double l1_dist(const Tensor2& pts, std::size_t i, const Tensor2& cent, std::size_t c) {
    double s = 0;
    for (std::size_t k = 0; k < pts.cols; ++k)
        s += std::abs(double(pts(i, k)) - double(cent(c, k)));
    return s;
}

// TSS/WSS/BSS per dimension against the final assignment; bss_norm is
// sqrt(sum_i BSS_i) / n_c.
void fill_gate(ClusterOutcome& out, const Tensor2& pts) {
    std::size_t n = pts.rows, d = pts.cols;
    out.tss.assign(d, 0.0);
    out.wss.assign(d, 0.0);
    out.bss.assign(d, 0.0);
    std::vector<double> grand(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) grand[k] += double(pts(i, k));
    for (auto& g : grand) g /= double(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            double dg = double(pts(i, k)) - grand[k];
            out.tss[k] += dg * dg;
            double dc = double(pts(i, k)) -
                        double(out.centroids(std::size_t(out.assignment[i]), k));
            out.wss[k] += dc * dc;
        }
    double sum = 0;
    for (std::size_t k = 0; k < d; ++k) {
        out.bss[k] = out.tss[k] - out.wss[k];
        sum += std::max(out.bss[k], 0.0);
    }
    out.bss_norm = std::sqrt(sum) / double(n);
    out.mixed = out.bss_norm >= 0.5;
}

void pick_dominant(ClusterOutcome& out) {
    std::size_t n0 = 0, n1 = 0;
    for (int a : out.assignment) (a == 0 ? n0 : n1)++;
    if (n0 == n1)
        out.dominant = out.assignment.empty() ? 0 : out.assignment[0];
    else
        out.dominant = n1 > n0 ? 1 : 0;
}

ClusterOutcome trivial_outcome(const Tensor2& pts) {
    ClusterOutcome out;
    std::size_t n = pts.rows, d = pts.cols;
    out.assignment.assign(n, 0);
    out.centroids = Tensor2(1, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) out.centroids(0, k) += pts(i, k) / float(n);
    out.tss.assign(d, 0.0);
    out.wss.assign(d, 0.0);
    out.bss.assign(d, 0.0);
    return out;
}

ClusterOutcome cluster2(const Tensor2& pts, std::uint64_t seed, int max_iter, bool medians) {
    std::size_t n = pts.rows, d = pts.cols;
    if (d == 0) throw std::runtime_error("kmeans2: zero-dimensional points");
    if (n < 2) return trivial_outcome(pts);

    std::mt19937 rng{std::uint32_t(seed)};
    // k-means++: uniform first pick, second weighted by squared distance.
    std::size_t c0 = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    Tensor2 cent(2, d);
    for (std::size_t k = 0; k < d; ++k) cent(0, k) = pts(c0, k);
    std::vector<double> w(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += (w[i] = sq_dist(pts, i, cent, 0));
    std::size_t c1 = c0 == 0 ? (n > 1 ? 1 : 0) : 0;
    if (total > 0) {
        double r = std::uniform_real_distribution<double>(0.0, total)(rng);
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += w[i];
            if (r <= acc) {
                c1 = i;
                break;
            }
        }
    }
    for (std::size_t k = 0; k < d; ++k) cent(1, k) = pts(c1, k);

    ClusterOutcome out;
    out.assignment.assign(n, 0);
    std::vector<int> prev(n, -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double d0 = medians ? l1_dist(pts, i, cent, 0) : sq_dist(pts, i, cent, 0);
            double d1 = medians ? l1_dist(pts, i, cent, 1) : sq_dist(pts, i, cent, 1);
            out.assignment[i] = d1 < d0 ? 1 : 0;  // ties to the lower cluster id
        }
        // Empty-cluster repair: hand over the point farthest from the
        // surviving centroid.
        for (int c = 0; c < 2; ++c) {
            if (std::count(out.assignment.begin(), out.assignment.end(), c)) continue;
            std::size_t far = 0;
            double best = -1;
            for (std::size_t i = 0; i < n; ++i) {
                double di = sq_dist(pts, i, cent, std::size_t(1 - c));
                if (di > best) {
                    best = di;
                    far = i;
                }
            }
            out.assignment[far] = c;
        }
        if (out.assignment == prev) break;
        prev = out.assignment;
        for (int c = 0; c < 2; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i)
                if (out.assignment[i] == c) members.push_back(i);
            for (std::size_t k = 0; k < d; ++k) {
                if (medians) {
                    std::vector<float> col;
                    col.reserve(members.size());
                    for (auto i : members) col.push_back(pts(i, k));
                    std::sort(col.begin(), col.end());
                    std::size_t m = col.size();
                    cent(std::size_t(c), k) =
                        m % 2 ? col[m / 2] : (col[m / 2 - 1] + col[m / 2]) * 0.5f;
                } else {
                    double s = 0;
                    for (auto i : members) s += double(pts(i, k));
                    cent(std::size_t(c), k) = float(s / double(members.size()));
                }
            }
        }
    }
    out.centroids = cent;
    fill_gate(out, pts);
    pick_dominant(out);
    return out;
}

}  // namespace

ClusterOutcome kmeans2(const Tensor2& points, std::uint64_t seed, int max_iter) {
    return cluster2(points, seed, max_iter, false);
}

ClusterOutcome kmedians2(const Tensor2& points, std::uint64_t seed, int max_iter) {
    return cluster2(points, seed, max_iter, true);
}

RemovalStrategy parse_strategy(const std::string& name) {
    if (name == "kmeans") return RemovalStrategy::kmeans;
    if (name == "kmedians") return RemovalStrategy::kmedians;
    if (name == "gmm_mahalanobis") return RemovalStrategy::gmm_mahalanobis;
    if (name == "centroid_threshold") return RemovalStrategy::centroid_threshold;
    if (name == "min_connection") return RemovalStrategy::min_connection;
    throw std::runtime_error(
        "unknown strategy \"" + name +
        "\" (valid: kmeans, kmedians, gmm_mahalanobis, centroid_threshold, min_connection)");
}

std::string strategy_name(RemovalStrategy s) {
    switch (s) {
        case RemovalStrategy::kmeans: return "kmeans";
        case RemovalStrategy::kmedians: return "kmedians";
        case RemovalStrategy::gmm_mahalanobis: return "gmm_mahalanobis";
        case RemovalStrategy::centroid_threshold: return "centroid_threshold";
        case RemovalStrategy::min_connection: return "min_connection";
    }
    return "?";
}

std::vector<int> remove_outliers(RemovalStrategy strategy, const Tensor2& points,
                                 const std::vector<std::uint8_t>& adjacency,
                                 std::uint64_t seed, double centroid_theta) {
    std::size_t n = points.rows, d = points.cols;
    std::vector<int> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = int(i);
    if (n < 2) return all;

    std::vector<int> kept;
    switch (strategy) {
        case RemovalStrategy::kmeans:
        case RemovalStrategy::kmedians: {
            auto out = strategy == RemovalStrategy::kmeans ? kmeans2(points, seed)
                                                          : kmedians2(points, seed);
            if (!out.mixed) return all;
            for (std::size_t i = 0; i < n; ++i)
                if (out.assignment[i] == out.dominant) kept.push_back(int(i));
            break;
        }
        case RemovalStrategy::gmm_mahalanobis: {
            std::vector<double> mu(d, 0.0), var(d, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < d; ++k) mu[k] += double(points(i, k));
            for (auto& m : mu) m /= double(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < d; ++k) {
                    double dk = double(points(i, k)) - mu[k];
                    var[k] += dk * dk;
                }
            for (auto& v : var) v = std::max(v / double(n), 1e-12);
            std::vector<double> dist(n);
            std::size_t closest = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0;
                for (std::size_t k = 0; k < d; ++k) {
                    double dk = double(points(i, k)) - mu[k];
                    s += dk * dk / var[k];
                }
                dist[i] = std::sqrt(s);
                if (dist[i] < dist[closest]) closest = i;
            }
            for (std::size_t i = 0; i < n; ++i)
                if (dist[i] <= 1.0) kept.push_back(int(i));
            if (kept.empty()) kept.push_back(int(closest));
            break;
        }
        case RemovalStrategy::centroid_threshold: {
            Tensor2 cent(1, d);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < d; ++k) cent(0, k) += points(i, k) / float(n);
            std::vector<double> dist(n);
            double mean = 0;
            for (std::size_t i = 0; i < n; ++i) mean += (dist[i] = std::sqrt(sq_dist(points, i, cent, 0)));
            mean /= double(n);
            for (std::size_t i = 0; i < n; ++i)
                if (dist[i] <= centroid_theta * mean) kept.push_back(int(i));
            break;
        }
        case RemovalStrategy::min_connection: {
            if (adjacency.size() != n * n)
                throw std::runtime_error("min_connection: adjacency size mismatch");
            std::vector<int> deg(n, 0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j && adjacency[i * n + j]) ++deg[i];
            int dmin = *std::min_element(deg.begin(), deg.end());
            for (std::size_t i = 0; i < n; ++i)
                if (deg[i] > dmin) kept.push_back(int(i));
            if (kept.empty()) return all;  // all degrees tie: keep everyone
            break;
        }
    }
    if (kept.empty()) return all;
    return kept;
}

std::vector<float> group_vector(const Tensor2& points, const std::vector<int>& kept) {
    if (kept.empty()) throw std::runtime_error("group_vector: empty kept set");
    std::vector<float> out(points.cols, 0.f);
    for (int i : kept)
        for (std::size_t k = 0; k < points.cols; ++k) out[k] += points(std::size_t(i), k);
    for (auto& x : out) x /= float(kept.size());
    return out;
}

float FcModel::score(const std::vector<float>& v) const {
    if (fallback) return fallback_score;
    auto z = layer.forward(v);
    return sigmoid(z[0]);
}

FcModel train_fc(const std::vector<std::vector<float>>& vectors, const std::vector<int>& labels,
                 const FcTrainConfig& cfg, std::uint64_t seed) {
    if (vectors.empty() || vectors.size() != labels.size())
        throw std::runtime_error("train_fc: bad training set");
    FcModel model;
    model.in_dim = int(vectors[0].size());
    long long pos = std::count(labels.begin(), labels.end(), 1);
    if (pos == 0 || pos == (long long)labels.size()) {
        std::cerr << "warning: single-class training set, using majority classifier\n";
        model.fallback = true;
        model.fallback_score = pos ? 1.f : 0.f;
        model.layer = Linear<float>(std::size_t(model.in_dim), 1);
        return model;
    }
    model.layer = Linear<float>(std::size_t(model.in_dim), 1);
    std::mt19937 rng{std::uint32_t(seed)};
    std::normal_distribution<double> dist(0.0, 1.0);
    float scale = 1.f / std::sqrt(float(model.in_dim));
    for (auto& w : model.layer.W) w = float(dist(rng)) * scale;

    FcModel grads;
    grads.in_dim = model.in_dim;
    grads.layer = Linear<float>(std::size_t(model.in_dim), 1);
    auto slots = bind_slots<float>(model, grads);
    Optimizer<float> opt(OptKind::adam, cfg.lr);
    std::vector<float> dz(1), dx;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        zero_grads(slots);
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            auto z = model.layer.forward(vectors[i]);
            float p = sigmoid(z[0]);
            dz[0] = (p - float(labels[i])) / float(vectors.size());
            model.layer.backward(vectors[i], dz, grads.layer, dx);
        }
        opt.step(slots);
    }
    return model;
}

}  // namespace groupsleuth
