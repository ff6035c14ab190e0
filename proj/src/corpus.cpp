#include "groupsleuth/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace groupsleuth {

static const char* kCorpusHeader = "#groupsleuth-corpus v1";

std::int32_t parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream ss(iso);
    ss >> y >> dash1 >> m >> dash2 >> d;
    if (!ss || dash1 != '-' || dash2 != '-' || m < 1 || m > 12 || d < 1 || d > 31)
        throw std::runtime_error("bad date \"" + iso + "\"");
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{unsigned(m)}, day{unsigned(d)}};
    if (!ymd.ok()) throw std::runtime_error("bad date \"" + iso + "\"");
    return std::int32_t(sys_days(ymd).time_since_epoch().count());
}

std::string format_date(std::int32_t days) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

std::string escape_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            char n = s[++i];
            if (n == 't') out += '\t';
            else if (n == 'n') out += '\n';
            else if (n == 'r') out += '\r';
            else out += n;
        } else {
            out += s[i];
        }
    }
    return out;
}

void Corpus::rebuild_indices() {
    reviewer_index.clear();
    item_index.clear();
    reviewer_ids.clear();
    item_ids.clear();
    if (reviews.empty()) return;
    epoch = reviews.front().date;
    for (const auto& r : reviews) {
        epoch = std::min(epoch, r.date);
        if (reviewer_index.emplace(r.reviewer_id, int(reviewer_ids.size())).second)
            reviewer_ids.push_back(r.reviewer_id);
        if (item_index.emplace(r.item_id, int(item_ids.size())).second)
            item_ids.push_back(r.item_id);
    }
}

static bool trimmed_empty(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read corpus file " + path);
    Corpus corpus;
    std::string line;
    int lineno = 0;
    std::vector<std::string> errors;
    while (std::getline(f, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("#groupsleuth-corpus", 0) == 0) continue;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        auto reject = [&](const std::string& why) {
            if (errors.size() < 10)
                errors.push_back("line " + std::to_string(lineno) + ": " + why);
        };
        if (fields.size() != 7) {
            reject("expected 7 tab-separated fields, got " + std::to_string(fields.size()));
            continue;
        }
        Review r;
        r.review_id = fields[0];
        r.reviewer_id = fields[1];
        r.item_id = fields[2];
        try {
            r.rating = std::stoi(fields[3]);
        } catch (...) {
            reject("bad rating \"" + fields[3] + "\"");
            continue;
        }
        if (r.rating < 1 || r.rating > 5) {
            reject("rating " + fields[3] + " outside [1,5]");
            continue;
        }
        try {
            r.date = parse_date(fields[4]);
        } catch (const std::exception& e) {
            reject(e.what());
            continue;
        }
        if (fields[5] != "0" && fields[5] != "1") {
            reject("bad label \"" + fields[5] + "\"");
            continue;
        }
        r.label = fields[5] == "1" ? ReviewLabel::fraud : ReviewLabel::genuine;
        r.text = unescape_field(fields[6]);
        if (trimmed_empty(r.text)) {
            reject("empty review text");
            continue;
        }
        corpus.reviews.push_back(std::move(r));
    }
    if (!errors.empty()) {
        std::string msg = "malformed corpus records:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }
    if (corpus.reviews.empty()) throw std::runtime_error("empty corpus " + path);
    corpus.rebuild_indices();
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write corpus file " + path);
    f << kCorpusHeader << "\n";
    for (const auto& r : corpus.reviews) {
        f << r.review_id << '\t' << r.reviewer_id << '\t' << r.item_id << '\t'
          << r.rating << '\t' << format_date(r.date) << '\t'
          << (r.label == ReviewLabel::fraud ? 1 : 0) << '\t'
          << escape_field(r.text) << "\n";
    }
}

std::vector<ReviewerLabel> derive_reviewer_labels(const Corpus& corpus) {
    if (corpus.reviews.empty()) throw std::runtime_error("empty corpus");
    std::vector<int> total(corpus.n_reviewers(), 0), fraud(corpus.n_reviewers(), 0);
    for (const auto& r : corpus.reviews) {
        int idx = corpus.reviewer_index.at(r.reviewer_id);
        ++total[idx];
        if (r.label == ReviewLabel::fraud) ++fraud[idx];
    }
    std::vector<ReviewerLabel> out(corpus.n_reviewers());
    for (int i = 0; i < corpus.n_reviewers(); ++i) {
        out[i].reviewer_id = corpus.reviewer_ids[i];
        out[i].fraud_fraction = double(fraud[i]) / double(total[i]);
        out[i].fraudster = out[i].fraud_fraction > 0.5;  // ties go genuine
    }
    return out;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const std::vector<int>& labels, double train_fraction, std::uint64_t seed) {
    if (labels.size() < 2) throw std::runtime_error("split needs at least 2 groups");
    if (train_fraction <= 0 || train_fraction >= 1)
        throw std::runtime_error("train_fraction must be in (0,1)");
    std::vector<int> train, test;
    for (int cls : {0, 1}) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(int(i));
        if (idx.empty()) continue;
        std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (0x9e3779b9u * (cls + 1))));
        std::shuffle(idx.begin(), idx.end(), rng);
        std::size_t n_train = std::size_t(std::lround(train_fraction * double(idx.size())));
        n_train = std::min(n_train, idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? train : test).push_back(idx[i]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

}  // namespace groupsleuth
