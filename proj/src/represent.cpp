#include "groupsleuth/represent.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace groupsleuth {

std::optional<std::vector<float>> sentence_sowe(const std::vector<std::string>& tokens,
                                                const EmbeddingTable& table) {
    std::vector<float> sum(std::size_t(table.dim()), 0.f);
    int n = 0;
    for (const auto& t : tokens) {
        int id = table.lookup(t);
        if (id < 0) continue;  // OOV tokens are dropped
        for (std::size_t d = 0; d < sum.size(); ++d)
            sum[d] += table.vectors(std::size_t(id), d);
        ++n;
    }
    if (n == 0) return std::nullopt;
    for (auto& x : sum) x /= float(n);
    return sum;
}

std::optional<std::vector<float>> review_sowe(const std::string& text,
                                              const EmbeddingTable& table) {
    return sentence_sowe(tokenize(text), table);
}

ReviewerVector reviewer_vector(const std::string& reviewer_id,
                               const std::vector<const Review*>& reviews,
                               const EmbeddingTable& table) {
    if (reviews.empty()) throw std::runtime_error("reviewer_vector: no reviews");
    std::vector<float> pooled;
    int negatives = 0;
    for (const Review* r : reviews) {
        if (r->rating <= 2) ++negatives;
        for (const auto& sent : split_sentences(r->text)) {
            auto sowe = sentence_sowe(tokenize(sent), table);
            if (!sowe) continue;
            if (pooled.empty()) {
                pooled = *sowe;
            } else {
                for (std::size_t d = 0; d < pooled.size(); ++d)
                    pooled[d] = std::max(pooled[d], (*sowe)[d]);
            }
        }
    }
    if (pooled.empty())
        throw std::runtime_error("reviewer_vector: no usable sentences for " + reviewer_id);
    ReviewerVector out;
    out.reviewer_id = reviewer_id;
    out.semantic = pooled;
    out.nr = float(negatives) / float(reviews.size());
    out.v = pooled;
    out.v.push_back(out.nr);
    return out;
}

std::vector<ReviewerVector> compute_reviewer_vectors(const Corpus& corpus,
                                                     const EmbeddingTable& table) {
    std::vector<std::vector<const Review*>> per_reviewer(std::size_t(corpus.n_reviewers()));
    for (const auto& r : corpus.reviews)
        per_reviewer[std::size_t(corpus.reviewer_index.at(r.reviewer_id))].push_back(&r);
    std::vector<ReviewerVector> out(std::size_t(corpus.n_reviewers()));
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < corpus.n_reviewers(); ++i) {
        const auto& id = corpus.reviewer_ids[std::size_t(i)];
        try {
            out[std::size_t(i)] = reviewer_vector(id, per_reviewer[std::size_t(i)], table);
        } catch (const std::exception&) {
            ReviewerVector rv;
            rv.reviewer_id = id;
            rv.semantic.assign(std::size_t(table.dim()), 0.f);
            int neg = 0;
            for (const Review* r : per_reviewer[std::size_t(i)])
                if (r->rating <= 2) ++neg;
            rv.nr = per_reviewer[std::size_t(i)].empty()
                        ? 0.f
                        : float(neg) / float(per_reviewer[std::size_t(i)].size());
            rv.v = rv.semantic;
            rv.v.push_back(rv.nr);
            out[std::size_t(i)] = std::move(rv);
        }
    }
    return out;
}

ReviewerVector reviewer_vector_windowed(const Corpus& corpus, int reviewer_dense,
                                        std::int32_t start, std::int32_t end,
                                        const EmbeddingTable& table,
                                        const ReviewerVector& all_time) {
    std::vector<const Review*> in_window;
    const auto& id = corpus.reviewer_ids[std::size_t(reviewer_dense)];
    for (const auto& r : corpus.reviews)
        if (r.reviewer_id == id && r.date >= start && r.date <= end) in_window.push_back(&r);
    if (in_window.empty()) return all_time;
    try {
        return reviewer_vector(id, in_window, table);
    } catch (const std::exception&) {
        return all_time;
    }
}

void write_reviewer_vectors(const std::vector<ReviewerVector>& vecs, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write reviewer vectors " + path);
    f << "#groupsleuth-reviewer-vectors v1\n";
    for (const auto& rv : vecs) {
        f << rv.reviewer_id;
        for (float x : rv.v) f << '\t' << x;
        f << "\n";
    }
}

std::vector<ReviewerVector> load_reviewer_vectors(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read reviewer vectors " + path);
    std::vector<ReviewerVector> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ReviewerVector rv;
        ss >> rv.reviewer_id;
        float x;
        while (ss >> x) rv.v.push_back(x);
        if (rv.v.size() < 2) throw std::runtime_error("malformed reviewer vector line");
        rv.nr = rv.v.back();
        rv.semantic.assign(rv.v.begin(), rv.v.end() - 1);
        out.push_back(std::move(rv));
    }
    return out;
}

}  // namespace groupsleuth
