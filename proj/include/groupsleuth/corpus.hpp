#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace groupsleuth {

enum class ReviewLabel : int { genuine = 0, fraud = 1 };

/// One timestamped, rated, labeled review.
struct Review {
    std::string review_id;
    std::string reviewer_id;
    std::string item_id;
    int rating = 0;        // 1..5
    std::int32_t date = 0; // days since 1970-01-01, UTC day resolution
    ReviewLabel label = ReviewLabel::genuine;
    std::string text;
};

struct Corpus {
    std::vector<Review> reviews;
    std::int32_t epoch = 0;  // earliest review date
    std::map<std::string, int> reviewer_index;  // id -> dense index
    std::map<std::string, int> item_index;
    std::vector<std::string> reviewer_ids;  // dense index -> id
    std::vector<std::string> item_ids;

    int n_reviewers() const { return int(reviewer_ids.size()); }
    void rebuild_indices();
};

struct ReviewerLabel {
    std::string reviewer_id;
    bool fraudster = false;
    double fraud_fraction = 0.0;
};

// ISO-8601 day <-> days since 1970-01-01. parse_date throws on bad input.
std::int32_t parse_date(const std::string& iso);
std::string format_date(std::int32_t days);

/// Loads an escaped-TSV corpus (header "#groupsleuth-corpus v1"); rejects
/// records violating the Review invariants with line-numbered errors.
Corpus load_corpus(const std::string& path);
void write_corpus(const Corpus& corpus, const std::string& path);

std::string escape_field(const std::string& s);
std::string unescape_field(const std::string& s);

/// One label per distinct reviewer; fraudster iff fraud review fraction > 0.5.
std::vector<ReviewerLabel> derive_reviewer_labels(const Corpus& corpus);

/// Deterministic stratified split over items carrying binary labels.
/// Returns (train indices, test indices), each sorted ascending.
std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const std::vector<int>& labels, double train_fraction, std::uint64_t seed);

}  // namespace groupsleuth
