#include "groupsleuth/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace groupsleuth {

namespace {

constexpr std::int32_t kBaseDate = 15340;  // 2012-01-01

struct Builder {
    const SynthConfig& cfg;
    std::mt19937 rng;
    std::vector<std::string> fraud_pool, genuine_pool;
    std::vector<Review> reviews;
    int next_review = 0, next_item = 0, next_user = 0;

    Builder(const SynthConfig& c, std::uint64_t seed) : cfg(c), rng{std::uint32_t(seed)} {
        char buf[16];
        for (int i = 0; i < cfg.fraud_vocab; ++i) {
            std::snprintf(buf, sizeof buf, "fw%03d", i);
            fraud_pool.push_back(buf);
        }
        for (int i = 0; i < cfg.genuine_vocab; ++i) {
            std::snprintf(buf, sizeof buf, "gw%03d", i);
            genuine_pool.push_back(buf);
        }
    }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

    std::string new_item() {
        char buf[16];
        std::snprintf(buf, sizeof buf, "itm%05d", next_item++);
        return buf;
    }
    std::string new_user() {
        char buf[16];
        std::snprintf(buf, sizeof buf, "u%04d", next_user++);
        return buf;
    }

    std::string make_text(const std::vector<std::string>& pool) {
        std::ostringstream out;
        int n_sent = uniform(1, 3);
        for (int s = 0; s < n_sent; ++s) {
            int n_words = uniform(4, 8);
            for (int w = 0; w < n_words; ++w) {
                if (w) out << ' ';
                out << pool[std::size_t(uniform(0, int(pool.size()) - 1))];
            }
            out << ". ";
        }
        std::string t = out.str();
        while (!t.empty() && t.back() == ' ') t.pop_back();
        return t;
    }

    std::int32_t window_date(int w) {
        return kBaseDate + std::int32_t(w) * cfg.window_len_days +
               uniform(0, cfg.window_len_days - 1);
    }

    void add_review(const std::string& user, const std::string& item, int rating,
                    std::int32_t date, bool fraud_label, const std::string& text) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "rv%06d", next_review++);
        reviews.push_back({buf, user, item, rating, date,
                           fraud_label ? ReviewLabel::fraud : ReviewLabel::genuine, text});
    }

    int genuine_event_rating() { return unit() < 0.9 ? uniform(3, 5) : 2; }
    int fraud_event_rating() { return unit() < cfg.fraud_low_rating_rate ? 1 : 5; }
};

struct Event {
    int window;
    std::string item;
    int rating;
};

}  // namespace

SynthResult generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.group_size_min < 2 || cfg.group_size_max < cfg.group_size_min)
        throw std::runtime_error("synth: group_size range must be >= 2");
    if (cfg.n_windows < 1) throw std::runtime_error("synth: n_windows must be >= 1");
    if (cfg.window_len_days < 1) throw std::runtime_error("synth: window_len_days must be >= 1");
    if (cfg.camouflage_rate < 0 || cfg.camouflage_rate > 1 || cfg.outlier_rate < 0 ||
        cfg.outlier_rate > 1)
        throw std::runtime_error("synth: rates must be in [0,1]");
    if (cfg.n_fraud_groups + cfg.n_genuine_groups < 1)
        throw std::runtime_error("synth: no groups requested");

    Builder b(cfg, seed);
    GroundTruth truth;

    // Genuine groups first so fraudster camouflage can attach to their events.
    std::vector<Event> genuine_events;
    std::vector<std::vector<std::string>> genuine_rosters;

    auto pick_active_windows = [&]() {
        std::vector<int> active;
        for (int w = 0; w < cfg.n_windows; ++w)
            if (b.unit() < 0.7) active.push_back(w);
        while (int(active.size()) < std::min(2, cfg.n_windows)) {
            int w = b.uniform(0, cfg.n_windows - 1);
            if (std::find(active.begin(), active.end(), w) == active.end()) {
                active.push_back(w);
                std::sort(active.begin(), active.end());
            }
        }
        return active;
    };

    auto plant_group = [&](bool fraud, int ordinal) {
        char gid[16];
        std::snprintf(gid, sizeof gid, "%s%03d", fraud ? "FG" : "GG", ordinal);
        int size = b.uniform(cfg.group_size_min, cfg.group_size_max);
        std::vector<std::string> members;
        std::vector<bool> is_outlier(std::size_t(size), false);
        int max_outliers = (size - 1) / 2;
        int outliers = 0;
        for (int i = 0; i < size; ++i) {
            members.push_back(b.new_user());
            if (fraud && outliers < max_outliers && b.unit() < cfg.outlier_rate) {
                is_outlier[std::size_t(i)] = true;
                ++outliers;
            }
        }
        const auto& event_pool = fraud ? b.fraud_pool : b.genuine_pool;
        std::vector<int> active = pick_active_windows();
        bool first_event = true;
        for (int w : active) {
            int n_events = b.uniform(1, 2);
            for (int e = 0; e < n_events; ++e) {
                Event ev{w, b.new_item(),
                         fraud ? b.fraud_event_rating() : b.genuine_event_rating()};
                std::vector<int> part;
                if (first_event) {
                    for (int i = 0; i < size; ++i) part.push_back(i);
                    first_event = false;
                } else {
                    for (int i = 0; i < size; ++i)
                        if (b.unit() < 0.6) part.push_back(i);
                    while (int(part.size()) < 2) {
                        int i = b.uniform(0, size - 1);
                        if (std::find(part.begin(), part.end(), i) == part.end())
                            part.push_back(i);
                    }
                    std::sort(part.begin(), part.end());
                }
                for (int i : part) {
                    // Review label: fraud only for true fraudsters in fraud events.
                    bool label = fraud && !is_outlier[std::size_t(i)];
                    b.add_review(members[std::size_t(i)], ev.item, ev.rating,
                                 b.window_date(w), label, b.make_text(event_pool));
                }
                if (!fraud) genuine_events.push_back(ev);
            }
        }
        // Solo reviews give each reviewer an out-of-group history of their own
        // type; outliers planted in fraud groups stay genuine overall.
        for (int i = 0; i < size; ++i) {
            bool fraudster = fraud && !is_outlier[std::size_t(i)];
            int n_solo = b.uniform(cfg.solo_reviews_min, cfg.solo_reviews_max);
            if (fraud && is_outlier[std::size_t(i)]) n_solo = std::max(n_solo, 3);
            for (int s = 0; s < n_solo; ++s) {
                int w = b.uniform(0, cfg.n_windows - 1);
                int rating = fraudster ? (b.unit() < 0.5 ? 1 : 5) : b.genuine_event_rating();
                b.add_review(members[std::size_t(i)], b.new_item(), rating, b.window_date(w),
                             fraudster, b.make_text(fraudster ? b.fraud_pool : b.genuine_pool));
            }
        }
        if (fraud) {
            for (int i = 0; i < size; ++i) {
                if (is_outlier[std::size_t(i)]) continue;
                if (b.unit() < cfg.camouflage_rate && !genuine_events.empty()) {
                    int n_touch = b.uniform(1, 2);
                    for (int t = 0; t < n_touch; ++t) {
                        const Event& ev =
                            genuine_events[std::size_t(b.uniform(0, int(genuine_events.size()) - 1))];
                        b.add_review(members[std::size_t(i)], ev.item, ev.rating,
                                     b.window_date(ev.window), false,
                                     b.make_text(b.genuine_pool));
                    }
                }
            }
        }
        truth.groups.push_back({gid, members, fraud});
        if (!fraud) genuine_rosters.push_back(members);
    };

    for (int g = 0; g < cfg.n_genuine_groups; ++g) plant_group(false, g);
    for (int g = 0; g < cfg.n_fraud_groups; ++g) plant_group(true, g);

    // A dedicated solo reviewer anchors the corpus epoch at the start of
    // window 0 so the 28-day tiling matches the planting schedule. It never
    // co-reviews, so grouping discards it as a singleton.
    b.add_review(b.new_user(), b.new_item(), 4, kBaseDate, false,
                 b.make_text(b.genuine_pool));

    std::stable_sort(b.reviews.begin(), b.reviews.end(),
                     [](const Review& a, const Review& c) {
                         if (a.date != c.date) return a.date < c.date;
                         return a.review_id < c.review_id;
                     });
    SynthResult out;
    out.corpus.reviews = std::move(b.reviews);
    if (out.corpus.reviews.empty()) throw std::runtime_error("synth: generated empty corpus");
    out.corpus.rebuild_indices();
    out.truth = std::move(truth);
    return out;
}

static const char* kTruthHeader = "#groupsleuth-groundtruth v1";

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write ground truth " + path);
    f << kTruthHeader << "\n";
    for (const auto& g : truth.groups) {
        f << g.group_id << '\t';
        for (std::size_t i = 0; i < g.members.size(); ++i) {
            if (i) f << ',';
            f << g.members[i];
        }
        f << '\t' << (g.fraud ? 1 : 0) << "\n";
    }
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read ground truth " + path);
    GroundTruth truth;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (first) {
            first = false;
            if (line.rfind("#groupsleuth-groundtruth", 0) == 0) continue;
        }
        if (line.empty()) continue;
        std::istringstream ss(line);
        PlantedGroup g;
        std::string members, label;
        if (!std::getline(ss, g.group_id, '\t') || !std::getline(ss, members, '\t') ||
            !std::getline(ss, label, '\t'))
            throw std::runtime_error("malformed ground truth line in " + path);
        std::istringstream ms(members);
        std::string m;
        while (std::getline(ms, m, ',')) g.members.push_back(m);
        g.fraud = label == "1";
        truth.groups.push_back(std::move(g));
    }
    return truth;
}

}  // namespace groupsleuth
