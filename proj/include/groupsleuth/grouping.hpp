#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groupsleuth/corpus.hpp"
#include "groupsleuth/embedding.hpp"

namespace groupsleuth {

struct TimeWindow {
    int index = 0;
    std::int32_t start_date = 0;
    std::int32_t end_date = 0;  // start + window_len - 1
};

/// Undirected co-review graph for one window over dense reviewer indices.
struct CoReviewGraph {
    TimeWindow window;
    std::vector<std::pair<int, int>> edges;  // (a, b) with a < b
};

/// A candidate group: fixed roster plus one adjacency slice per window.
struct GroupTimeline {
    std::string group_id;
    std::vector<int> members;                    // dense reviewer indices, ascending
    std::vector<std::vector<std::uint8_t>> slices;  // per window, n*n row-major 0/1

    int size() const { return int(members.size()); }
    int n_windows() const { return int(slices.size()); }
    std::uint8_t& at(int w, int i, int j) { return slices[std::size_t(w)][std::size_t(i) * members.size() + std::size_t(j)]; }
    std::uint8_t at(int w, int i, int j) const { return slices[std::size_t(w)][std::size_t(i) * members.size() + std::size_t(j)]; }
};

/// Tiles the corpus span from the epoch into windows of window_len days.
std::vector<TimeWindow> assign_windows(const Corpus& corpus, int window_len_days = 28);

inline int window_of(std::int32_t date, std::int32_t epoch, int window_len_days = 28) {
    return int((date - epoch) / window_len_days);
}

/// Edge iff two reviewers reviewed a common item in-window with equal rating
/// and review-text SoWE cosine >= tau.
CoReviewGraph co_review_edges(const Corpus& corpus, const TimeWindow& window,
                              const EmbeddingTable& table, double tau);

/// All windows at once; review SoWEs are computed a single time.
std::vector<CoReviewGraph> build_co_review_graphs(const Corpus& corpus,
                                                  const EmbeddingTable& table, double tau,
                                                  int window_len_days = 28);

/// Connected components of the cross-window union graph; singletons dropped,
/// rosters capped at m_max by union degree. Deterministic ids g0000, g0001, ...
/// ordered by smallest member index.
std::vector<GroupTimeline> build_group_timelines(const std::vector<CoReviewGraph>& graphs,
                                                 int m_max = 32);

}  // namespace groupsleuth
