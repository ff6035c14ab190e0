#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <string>

#include "groupsleuth/corpus.hpp"
#include "groupsleuth/grouping.hpp"
#include "groupsleuth/synth.hpp"
#include "helpers.hpp"

using namespace groupsleuth;

namespace {

SynthConfig tiny_config() {
    SynthConfig cfg;
    cfg.n_fraud_groups = 1;
    cfg.n_genuine_groups = 0;
    cfg.group_size_min = 3;
    cfg.group_size_max = 3;
    cfg.n_windows = 2;
    return cfg;
}

}  // namespace

TEST_CASE("planted group shares an (item, rating) event inside one window") {
    auto result = generate_synthetic(tiny_config(), 1);
    REQUIRE(result.truth.groups.size() == 1);
    const auto& members = result.truth.groups[0].members;
    REQUIRE(members.size() == 3);

    // (item, rating, window) -> distinct group members reviewing it
    std::map<std::tuple<std::string, int, int>, std::set<std::string>> events;
    for (const auto& r : result.corpus.reviews) {
        if (std::find(members.begin(), members.end(), r.reviewer_id) == members.end()) continue;
        int w = window_of(r.date, result.corpus.epoch, 28);
        events[{r.item_id, r.rating, w}].insert(r.reviewer_id);
    }
    bool shared = false;
    for (const auto& [key, who] : events)
        if (who.size() == members.size()) shared = true;
    CHECK(shared);
}

TEST_CASE("outlier_rate zero keeps fraud groups pure") {
    SynthConfig cfg;
    cfg.n_fraud_groups = 4;
    cfg.n_genuine_groups = 4;
    cfg.group_size_min = 3;
    cfg.group_size_max = 5;
    cfg.n_windows = 4;
    cfg.outlier_rate = 0.0;
    auto result = generate_synthetic(cfg, 9);
    auto labels = derive_reviewer_labels(result.corpus);
    std::map<std::string, bool> fraudster;
    for (const auto& l : labels) fraudster[l.reviewer_id] = l.fraudster;
    for (const auto& g : result.truth.groups)
        for (const auto& m : g.members)
            if (g.fraud)
                CHECK(fraudster.at(m));
            else
                CHECK(!fraudster.at(m));
}

TEST_CASE("seed changes texts but not group structure") {
    SynthConfig cfg = tiny_config();
    cfg.n_genuine_groups = 1;
    auto a = generate_synthetic(cfg, 1);
    auto b = generate_synthetic(cfg, 2);
    CHECK(a.truth.groups.size() == b.truth.groups.size());
    std::set<std::string> texts_a, texts_b;
    for (const auto& r : a.corpus.reviews) texts_a.insert(r.text);
    for (const auto& r : b.corpus.reviews) texts_b.insert(r.text);
    CHECK(texts_a != texts_b);
}

TEST_CASE("generation is deterministic per seed") {
    SynthConfig cfg = tiny_config();
    cfg.n_genuine_groups = 2;
    cfg.camouflage_rate = 0.3;
    cfg.outlier_rate = 0.3;
    auto a = generate_synthetic(cfg, 42);
    auto b = generate_synthetic(cfg, 42);
    REQUIRE(a.corpus.reviews.size() == b.corpus.reviews.size());
    for (std::size_t i = 0; i < a.corpus.reviews.size(); ++i) {
        CHECK(a.corpus.reviews[i].review_id == b.corpus.reviews[i].review_id);
        CHECK(a.corpus.reviews[i].text == b.corpus.reviews[i].text);
        CHECK(a.corpus.reviews[i].date == b.corpus.reviews[i].date);
    }
}

TEST_CASE("config validation") {
    SynthConfig cfg = tiny_config();
    cfg.group_size_min = 1;
    cfg.group_size_max = 1;
    CHECK_THROWS(generate_synthetic(cfg, 1));
    cfg = tiny_config();
    cfg.n_windows = 0;
    CHECK_THROWS(generate_synthetic(cfg, 1));
    cfg = tiny_config();
    cfg.camouflage_rate = 1.5;
    CHECK_THROWS(generate_synthetic(cfg, 1));
    cfg = tiny_config();
    cfg.n_fraud_groups = 0;
    cfg.n_genuine_groups = 0;
    CHECK_THROWS(generate_synthetic(cfg, 1));
}

TEST_CASE("ground truth sidecar round trip") {
    testutil::TempDir dir("gs_test_synth");
    SynthConfig cfg = tiny_config();
    cfg.n_genuine_groups = 1;
    auto result = generate_synthetic(cfg, 3);
    write_ground_truth(result.truth, dir.file("gt.tsv"));
    auto back = load_ground_truth(dir.file("gt.tsv"));
    REQUIRE(back.groups.size() == result.truth.groups.size());
    for (std::size_t i = 0; i < back.groups.size(); ++i) {
        CHECK(back.groups[i].group_id == result.truth.groups[i].group_id);
        CHECK(back.groups[i].members == result.truth.groups[i].members);
        CHECK(back.groups[i].fraud == result.truth.groups[i].fraud);
    }
}
