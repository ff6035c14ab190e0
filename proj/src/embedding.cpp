#include "groupsleuth/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace groupsleuth {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        bool word_char = std::isalnum(c) || c >= 0x80;
        if (word_char) {
            cur += char(std::tolower(c));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            if (!tokenize(cur).empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!tokenize(cur).empty()) out.push_back(cur);
    return out;
}

EmbeddingTable train_cbow(const Corpus& corpus, const CbowConfig& cfg,
                          std::uint64_t seed) {
    // Vocabulary with frequency filter.
    std::map<std::string, long long> freq;
    std::vector<std::vector<int>> sequences;
    for (const auto& r : corpus.reviews)
        for (const auto& w : tokenize(r.text)) ++freq[w];
    EmbeddingTable table;
    std::vector<long long> counts;
    for (const auto& [w, c] : freq) {
        if (c >= cfg.min_count) {
            table.vocab.emplace(w, int(counts.size()));
            counts.push_back(c);
        }
    }
    if (table.vocab.empty()) throw std::runtime_error("cbow: empty vocabulary");
    int v = int(counts.size()), dim = cfg.dim;

    for (const auto& r : corpus.reviews) {
        std::vector<int> seq;
        for (const auto& w : tokenize(r.text)) {
            int id = table.lookup(w);
            if (id >= 0) seq.push_back(id);
        }
        if (seq.size() >= 2) sequences.push_back(std::move(seq));
    }

    std::mt19937 rng{std::uint32_t(seed)};
    Tensor2 win{std::size_t(v), std::size_t(dim)}, wout{std::size_t(v), std::size_t(dim)};
    win.randn(rng, 0.5f / float(dim));

    // Unigram^0.75 sampling table for negatives.
    std::vector<double> cum(std::size_t(v), 0.0);
    double total = 0;
    for (int i = 0; i < v; ++i) {
        total += std::pow(double(counts[std::size_t(i)]), 0.75);
        cum[std::size_t(i)] = total;
    }
    auto sample_negative = [&]() {
        double u = std::uniform_real_distribution<double>(0.0, total)(rng);
        return int(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    };

    // (sequence, position) training examples, reshuffled per epoch.
    std::vector<std::pair<int, int>> examples;
    for (int s = 0; s < int(sequences.size()); ++s)
        for (int p = 0; p < int(sequences[std::size_t(s)].size()); ++p)
            examples.push_back({s, p});

    std::vector<float> h(std::size_t(dim), 0.f), dh(std::size_t(dim), 0.f);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(examples.begin(), examples.end(), rng);
        int in_batch = 0;
        for (auto [s, p] : examples) {
            const auto& seq = sequences[std::size_t(s)];
            int center = seq[std::size_t(p)];
            std::vector<int> ctx;
            for (int off = -cfg.window; off <= cfg.window; ++off) {
                int q = p + off;
                if (off != 0 && q >= 0 && q < int(seq.size()))
                    ctx.push_back(seq[std::size_t(q)]);
            }
            if (ctx.empty()) continue;
            std::fill(h.begin(), h.end(), 0.f);
            for (int c : ctx)
                for (int d = 0; d < dim; ++d) h[std::size_t(d)] += win(std::size_t(c), std::size_t(d));
            for (auto& x : h) x /= float(ctx.size());

            std::fill(dh.begin(), dh.end(), 0.f);
            for (int k = 0; k <= cfg.negatives; ++k) {
                int target = k == 0 ? center : sample_negative();
                if (k > 0 && target == center) continue;
                float y = k == 0 ? 1.f : 0.f;
                float score = 0;
                for (int d = 0; d < dim; ++d)
                    score += h[std::size_t(d)] * wout(std::size_t(target), std::size_t(d));
                float g = (sigmoid(score) - y) * float(cfg.lr);
                for (int d = 0; d < dim; ++d) {
                    dh[std::size_t(d)] += g * wout(std::size_t(target), std::size_t(d));
                    wout(std::size_t(target), std::size_t(d)) -= g * h[std::size_t(d)];
                }
            }
            float scale = 1.f / float(ctx.size());
            for (int c : ctx)
                for (int d = 0; d < dim; ++d)
                    win(std::size_t(c), std::size_t(d)) -= dh[std::size_t(d)] * scale;
            if (++in_batch == cfg.batch) in_batch = 0;  // batch marks shuffling granularity
        }
    }
    win.require_finite("cbow embeddings");
    table.vectors = std::move(win);
    return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read embeddings " + path);
    EmbeddingTable table;
    std::vector<std::vector<float>> rows;
    std::string line;
    int lineno = 0, dim = -1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        std::vector<float> vals;
        float x;
        while (ss >> x) vals.push_back(x);
        if (vals.empty())
            throw std::runtime_error("embeddings line " + std::to_string(lineno) + ": no values");
        if (dim < 0) dim = int(vals.size());
        if (int(vals.size()) != dim)
            throw std::runtime_error("embeddings line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(dim) + " values, got " +
                                     std::to_string(vals.size()));
        auto it = table.vocab.find(word);
        if (it != table.vocab.end()) {
            std::cerr << "warning: duplicate embedding for \"" << word << "\", keeping last\n";
            rows[std::size_t(it->second)] = std::move(vals);
        } else {
            table.vocab.emplace(word, int(rows.size()));
            rows.push_back(std::move(vals));
        }
    }
    if (rows.empty()) throw std::runtime_error("empty embeddings file " + path);
    table.vectors = Tensor2(rows.size(), std::size_t(dim));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < std::size_t(dim); ++j) table.vectors(i, j) = rows[i][j];
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write embeddings " + path);
    f << "#groupsleuth-embeddings v1\n";
    std::vector<const std::string*> words(table.vocab.size());
    for (const auto& [w, i] : table.vocab) words[std::size_t(i)] = &w;
    for (std::size_t i = 0; i < words.size(); ++i) {
        f << *words[i];
        for (std::size_t j = 0; j < table.vectors.cols; ++j) f << ' ' << table.vectors(i, j);
        f << "\n";
    }
}

}  // namespace groupsleuth
