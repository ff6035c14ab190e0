#include "groupsleuth/grouping.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "groupsleuth/represent.hpp"

namespace groupsleuth {

std::vector<TimeWindow> assign_windows(const Corpus& corpus, int window_len_days) {
    if (corpus.reviews.empty()) throw std::runtime_error("assign_windows: empty corpus");
    std::int32_t last = corpus.epoch;
    for (const auto& r : corpus.reviews) last = std::max(last, r.date);
    int n = window_of(last, corpus.epoch, window_len_days) + 1;
    std::vector<TimeWindow> out;
    for (int i = 0; i < n; ++i) {
        std::int32_t start = corpus.epoch + std::int32_t(i) * window_len_days;
        out.push_back({i, start, start + window_len_days - 1});
    }
    return out;
}

namespace {

std::vector<std::pair<int, int>> edges_for_window(
    const Corpus& corpus, const TimeWindow& win,
    const std::vector<std::optional<std::vector<float>>>& sowes, double tau) {
    // Bucket in-window reviews by (item, rating).
    std::map<std::pair<int, int>, std::vector<int>> buckets;  // -> review indices
    for (int i = 0; i < int(corpus.reviews.size()); ++i) {
        const auto& r = corpus.reviews[std::size_t(i)];
        if (r.date < win.start_date || r.date > win.end_date) continue;
        buckets[{corpus.item_index.at(r.item_id), r.rating}].push_back(i);
    }
    std::set<std::pair<int, int>> edge_set;
    for (const auto& [key, idxs] : buckets) {
        for (std::size_t a = 0; a < idxs.size(); ++a) {
            for (std::size_t b = a + 1; b < idxs.size(); ++b) {
                const auto& ra = corpus.reviews[std::size_t(idxs[a])];
                const auto& rb = corpus.reviews[std::size_t(idxs[b])];
                int ia = corpus.reviewer_index.at(ra.reviewer_id);
                int ib = corpus.reviewer_index.at(rb.reviewer_id);
                if (ia == ib) continue;
                const auto& sa = sowes[std::size_t(idxs[a])];
                const auto& sb = sowes[std::size_t(idxs[b])];
                if (!sa || !sb) continue;
                if (cosine(*sa, *sb) >= tau)
                    edge_set.insert({std::min(ia, ib), std::max(ia, ib)});
            }
        }
    }
    return {edge_set.begin(), edge_set.end()};
}

std::vector<std::optional<std::vector<float>>> all_review_sowes(const Corpus& corpus,
                                                                const EmbeddingTable& table) {
    std::vector<std::optional<std::vector<float>>> sowes(corpus.reviews.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)corpus.reviews.size(); ++i)
        sowes[std::size_t(i)] = review_sowe(corpus.reviews[std::size_t(i)].text, table);
    return sowes;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(std::size_t(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[std::size_t(x)] != x) {
            parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
            x = parent[std::size_t(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

CoReviewGraph co_review_edges(const Corpus& corpus, const TimeWindow& window,
                              const EmbeddingTable& table, double tau) {
    if (tau < -1.0 || tau > 1.0) throw std::runtime_error("co_review_edges: tau outside [-1,1]");
    CoReviewGraph g;
    g.window = window;
    g.edges = edges_for_window(corpus, window, all_review_sowes(corpus, table), tau);
    return g;
}

std::vector<CoReviewGraph> build_co_review_graphs(const Corpus& corpus,
                                                  const EmbeddingTable& table, double tau,
                                                  int window_len_days) {
    auto windows = assign_windows(corpus, window_len_days);
    auto sowes = all_review_sowes(corpus, table);
    std::vector<CoReviewGraph> out(windows.size());
#pragma omp parallel for schedule(dynamic)
    for (long long w = 0; w < (long long)windows.size(); ++w) {
        out[std::size_t(w)].window = windows[std::size_t(w)];
        out[std::size_t(w)].edges = edges_for_window(corpus, windows[std::size_t(w)], sowes, tau);
    }
    return out;
}

std::vector<GroupTimeline> build_group_timelines(const std::vector<CoReviewGraph>& graphs,
                                                 int m_max) {
    if (graphs.empty()) throw std::runtime_error("build_group_timelines: no windows");
    int max_node = -1;
    for (const auto& g : graphs)
        for (auto [a, b] : g.edges) max_node = std::max({max_node, a, b});
    if (max_node < 0) return {};

    // Union graph across all windows.
    std::set<std::pair<int, int>> union_edges;
    for (const auto& g : graphs)
        for (auto e : g.edges) union_edges.insert(e);

    UnionFind uf(max_node + 1);
    std::vector<int> degree(std::size_t(max_node + 1), 0);
    for (auto [a, b] : union_edges) {
        uf.unite(a, b);
        ++degree[std::size_t(a)];
        ++degree[std::size_t(b)];
    }

    std::map<int, std::vector<int>> components;
    for (int v = 0; v <= max_node; ++v)
        if (degree[std::size_t(v)] > 0) components[uf.find(v)].push_back(v);

    std::vector<GroupTimeline> out;
    for (auto& [root, roster] : components) {
        if (roster.size() < 2) continue;  // singleton components are discarded
        if (int(roster.size()) > m_max) {
            // Keep the m_max highest-union-degree members, ties by index.
            std::sort(roster.begin(), roster.end(), [&](int a, int b) {
                if (degree[std::size_t(a)] != degree[std::size_t(b)])
                    return degree[std::size_t(a)] > degree[std::size_t(b)];
                return a < b;
            });
            roster.resize(std::size_t(m_max));
            // Truncation may split the component; keep the largest piece.
            std::map<int, int> local;
            for (int i = 0; i < int(roster.size()); ++i) local[roster[std::size_t(i)]] = i;
            UnionFind sub(int(roster.size()));
            for (auto [a, b] : union_edges) {
                auto ia = local.find(a), ib = local.find(b);
                if (ia != local.end() && ib != local.end()) sub.unite(ia->second, ib->second);
            }
            std::map<int, std::vector<int>> pieces;
            for (int i = 0; i < int(roster.size()); ++i)
                pieces[sub.find(i)].push_back(roster[std::size_t(i)]);
            std::vector<int> best;
            for (auto& [r, piece] : pieces) {
                if (piece.size() > best.size() ||
                    (piece.size() == best.size() &&
                     (best.empty() || *std::min_element(piece.begin(), piece.end()) <
                                          *std::min_element(best.begin(), best.end()))))
                    best = piece;
            }
            roster = best;
            if (roster.size() < 2) continue;
        }
        std::sort(roster.begin(), roster.end());
        GroupTimeline t;
        t.members = roster;
        std::map<int, int> local;
        for (int i = 0; i < t.size(); ++i) local[t.members[std::size_t(i)]] = i;
        for (const auto& g : graphs) {
            std::vector<std::uint8_t> slice(roster.size() * roster.size(), 0);
            for (auto [a, b] : g.edges) {
                auto ia = local.find(a), ib = local.find(b);
                if (ia != local.end() && ib != local.end()) {
                    slice[std::size_t(ia->second) * roster.size() + std::size_t(ib->second)] = 1;
                    slice[std::size_t(ib->second) * roster.size() + std::size_t(ia->second)] = 1;
                }
            }
            t.slices.push_back(std::move(slice));
        }
        out.push_back(std::move(t));
    }
    // components are keyed by their smallest member, so this order is stable.
    char buf[16];
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::snprintf(buf, sizeof buf, "g%04zu", i);
        out[i].group_id = buf;
    }
    return out;
}

}  // namespace groupsleuth
