#include "groupsleuth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace groupsleuth {

Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw std::runtime_error("compute_metrics: size mismatch");
    Metrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && truth[i]) ++m.tp;
        else if (predicted[i] && !truth[i]) ++m.fp;
        else if (!predicted[i] && truth[i]) ++m.fn;
        else ++m.tn;
    }
    if (m.tp + m.fp > 0)
        m.precision = double(m.tp) / double(m.tp + m.fp);
    else
        m.precision_defined = false;
    if (m.tp + m.fn > 0)
        m.recall = double(m.tp) / double(m.tp + m.fn);
    else
        m.recall_defined = false;
    if (m.precision + m.recall > 0)
        m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
    else
        m.f1_defined = false;
    return m;
}

namespace {

// Top eigenvector of the centered covariance by power iteration; the data
// matrix is only touched through X^T (X v).
std::vector<double> power_axis(const std::vector<std::vector<double>>& centered, std::size_t d,
                               const std::vector<double>* deflate, double tol, int max_iter,
                               double& out_var) {
    std::vector<double> v(d);
    for (std::size_t k = 0; k < d; ++k) v[k] = 1.0 / std::sqrt(double(d));
    if (deflate) {
        double p = 0;
        for (std::size_t k = 0; k < d; ++k) p += v[k] * (*deflate)[k];
        for (std::size_t k = 0; k < d; ++k) v[k] -= p * (*deflate)[k];
        // Start orthogonal to the first axis even when they coincide.
        double nn = 0;
        for (auto x : v) nn += x * x;
        if (nn < 1e-18) {
            std::fill(v.begin(), v.end(), 0.0);
            v[0] = 1.0;
            double p2 = 0;
            for (std::size_t k = 0; k < d; ++k) p2 += v[k] * (*deflate)[k];
            for (std::size_t k = 0; k < d; ++k) v[k] -= p2 * (*deflate)[k];
            nn = 0;
            for (auto x : v) nn += x * x;
            if (nn < 1e-18) {
                out_var = 0;
                return std::vector<double>(d, 0.0);
            }
        }
        double inv = 1.0 / std::sqrt(nn);
        for (auto& x : v) x *= inv;
    }
    std::size_t n = centered.size();
    double lambda = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<double> w(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t k = 0; k < d; ++k) s += centered[i][k] * v[k];
            for (std::size_t k = 0; k < d; ++k) w[k] += s * centered[i][k];
        }
        for (auto& x : w) x /= double(n);
        if (deflate) {
            double p = 0;
            for (std::size_t k = 0; k < d; ++k) p += w[k] * (*deflate)[k];
            for (std::size_t k = 0; k < d; ++k) w[k] -= p * (*deflate)[k];
        }
        double nn = 0;
        for (auto x : w) nn += x * x;
        if (nn < 1e-18) {
            out_var = 0;
            return std::vector<double>(d, 0.0);
        }
        double inv = 1.0 / std::sqrt(nn);
        double diff = 0;
        for (std::size_t k = 0; k < d; ++k) {
            double nv = w[k] * inv;
            diff = std::max(diff, std::abs(nv - v[k]));
            v[k] = nv;
        }
        lambda = std::sqrt(nn);
        if (diff < tol) break;
    }
    out_var = lambda;
    return v;
}

}  // namespace

PcaResult pca_project(const Tensor2& reps, double tol, int max_iter) {
    std::size_t n = reps.rows, d = reps.cols;
    if (n < 2) throw std::runtime_error("pca_project: need at least 2 points");
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) mean[k] += double(reps(i, k));
    for (auto& m : mean) m /= double(n);
    std::vector<std::vector<double>> centered(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) centered[i][k] = double(reps(i, k)) - mean[k];

    PcaResult res;
    res.axes = Tensor2(2, d);
    double var1 = 0, var2 = 0;
    auto a1 = power_axis(centered, d, nullptr, tol, max_iter, var1);
    auto a2 = power_axis(centered, d, &a1, tol, max_iter, var2);
    if (var1 <= 1e-12) {
        res.degenerate = true;
        std::fill(a1.begin(), a1.end(), 0.0);
    }
    if (var2 <= 1e-12) {
        res.degenerate = true;
        std::fill(a2.begin(), a2.end(), 0.0);
    }
    for (std::size_t k = 0; k < d; ++k) {
        res.axes(0, k) = float(a1[k]);
        res.axes(1, k) = float(a2[k]);
    }
    res.projected = Tensor2(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        double p1 = 0, p2 = 0;
        for (std::size_t k = 0; k < d; ++k) {
            p1 += centered[i][k] * a1[k];
            p2 += centered[i][k] * a2[k];
        }
        res.projected(i, 0) = float(p1);
        res.projected(i, 1) = float(p2);
    }
    return res;
}

double silhouette(const Tensor2& points, const std::vector<int>& assignment) {
    std::size_t n = points.rows;
    if (assignment.size() != n) throw std::runtime_error("silhouette: size mismatch");
    auto dist = [&](std::size_t i, std::size_t j) {
        double s = 0;
        for (std::size_t k = 0; k < points.cols; ++k) {
            double d = double(points(i, k)) - double(points(j, k));
            s += d * d;
        }
        return std::sqrt(s);
    };
    long long n0 = std::count(assignment.begin(), assignment.end(), 0);
    long long n1 = (long long)n - n0;
    if (n0 == 0 || n1 == 0) return 0.0;
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long long own = assignment[i] == 0 ? n0 : n1;
        if (own == 1) continue;  // singleton clusters contribute 0
        double a = 0, b = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            (assignment[j] == assignment[i] ? a : b) += dist(i, j);
        }
        a /= double(own - 1);
        b /= double(assignment[i] == 0 ? n1 : n0);
        double denom = std::max(a, b);
        if (denom > 0) total += (b - a) / denom;
    }
    return total / double(n);
}

std::vector<InteractionRow> interaction_report(const Corpus& corpus,
                                               const std::vector<CoReviewGraph>& graphs,
                                               const GroundTruth& truth,
                                               const std::vector<ReviewerLabel>& labels) {
    std::map<std::string, bool> fraud_by_id;
    for (const auto& l : labels) fraud_by_id[l.reviewer_id] = l.fraudster;
    std::vector<char> is_fraud(std::size_t(corpus.n_reviewers()), 0);
    for (const auto& [id, idx] : corpus.reviewer_index) {
        auto it = fraud_by_id.find(id);
        if (it != fraud_by_id.end()) is_fraud[std::size_t(idx)] = it->second;
    }
    // group membership per dense reviewer index
    std::vector<std::vector<int>> groups_of(std::size_t(corpus.n_reviewers()));
    for (std::size_t g = 0; g < truth.groups.size(); ++g)
        for (const auto& member : truth.groups[g].members) {
            auto it = corpus.reviewer_index.find(member);
            if (it != corpus.reviewer_index.end())
                groups_of[std::size_t(it->second)].push_back(int(g));
        }

    std::vector<InteractionRow> rows;
    for (const auto& graph : graphs) {
        InteractionRow row;
        row.window = graph.window.index;
        std::set<std::pair<int, int>> gif, fig;  // (reviewer, group)
        auto consider = [&](int reviewer, int other) {
            for (int g : groups_of[std::size_t(other)]) {
                bool group_fraud = truth.groups[std::size_t(g)].fraud;
                if (!is_fraud[std::size_t(reviewer)] && group_fraud)
                    gif.insert({reviewer, g});
                else if (is_fraud[std::size_t(reviewer)] && !group_fraud)
                    fig.insert({reviewer, g});
            }
        };
        for (const auto& [a, b] : graph.edges) {
            consider(a, b);
            consider(b, a);
        }
        row.genuine_in_fraud = (long long)gif.size();
        row.fraud_in_genuine = (long long)fig.size();
        rows.push_back(row);
    }
    return rows;
}

void write_interaction_report(const std::vector<InteractionRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-interactions v1\n";
    out << "window\tgenuine_in_fraud\tfraud_in_genuine\n";
    for (const auto& r : rows)
        out << r.window << '\t' << r.genuine_in_fraud << '\t' << r.fraud_in_genuine << '\n';
}

}  // namespace groupsleuth
