#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groupsleuth/corpus.hpp"
#include "groupsleuth/grouping.hpp"
#include "groupsleuth/synth.hpp"
#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

/// Binary classification metrics with the fraud class as positive.
struct Metrics {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0, recall = 0, f1 = 0;
    bool precision_defined = true, recall_defined = true, f1_defined = true;
};

/// predicted/truth hold 0 (genuine) or 1 (fraud), index-aligned.
Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth);

struct PcaResult {
    Tensor2 projected;  // n x 2
    Tensor2 axes;       // 2 x d, unit rows, var(dim1) >= var(dim2)
    bool degenerate = false;  // second axis zeroed for rank-deficient input
};

/// Mean-centered projection onto the top-2 principal axes via power
/// iteration with deflation.
PcaResult pca_project(const Tensor2& reps, double tol = 1e-6, int max_iter = 1000);

/// Mean silhouette coefficient of a 2-way assignment (Euclidean).
double silhouette(const Tensor2& points, const std::vector<int>& assignment);

struct InteractionRow {
    int window = 0;
    long long genuine_in_fraud = 0;
    long long fraud_in_genuine = 0;
};

/// Per-window counts of distinct (reviewer, group) pairs where a reviewer's
/// label opposes a planted group's and at least one co-review edge links the
/// reviewer to a roster member in that window.
std::vector<InteractionRow> interaction_report(const Corpus& corpus,
                                               const std::vector<CoReviewGraph>& graphs,
                                               const GroundTruth& truth,
                                               const std::vector<ReviewerLabel>& labels);

void write_interaction_report(const std::vector<InteractionRow>& rows, const std::string& path);

}  // namespace groupsleuth
