#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "groupsleuth/classify.hpp"
#include "helpers.hpp"

using namespace groupsleuth;

namespace {

Tensor2 points_from(const std::vector<std::vector<float>>& rows) {
    Tensor2 t(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[0].size(); ++j) t(i, j) = rows[i][j];
    return t;
}

}  // namespace

TEST_CASE("kmeans2 worked example on {0, 2}") {
    auto outcome = kmeans2(points_from({{0.f}, {2.f}}), 1);
    REQUIRE(outcome.tss.size() == 1);
    CHECK(outcome.tss[0] == doctest::Approx(2.0));
    CHECK(outcome.wss[0] == doctest::Approx(0.0));
    CHECK(outcome.bss[0] == doctest::Approx(2.0));
    CHECK(outcome.bss_norm == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(outcome.mixed);
    CHECK(outcome.assignment[0] != outcome.assignment[1]);
}

TEST_CASE("identical points are never mixed") {
    auto outcome = kmeans2(points_from({{1.f, 1.f}, {1.f, 1.f}, {1.f, 1.f}}), 3);
    CHECK(outcome.bss_norm == doctest::Approx(0.0));
    CHECK(!outcome.mixed);
}

TEST_CASE("the dominant cluster is the larger one") {
    auto outcome = kmeans2(points_from({{0.f, 0.f}, {0.1f, 0.f}, {5.f, 5.f}}), 7);
    std::set<int> dom;
    for (int i = 0; i < 3; ++i)
        if (outcome.assignment[std::size_t(i)] == outcome.dominant) dom.insert(i);
    CHECK(dom == std::set<int>{0, 1});
}

TEST_CASE("bss identity and bounds hold on random data") {
    std::mt19937 rng{17};
    std::normal_distribution<float> d(0.f, 1.f);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 3 + rng() % 6, dim = 1 + rng() % 4;
        Tensor2 pts(n, dim);
        for (auto& x : pts.data) x = d(rng);
        for (auto outcome : {kmeans2(pts, trial), kmedians2(pts, trial)}) {
            for (std::size_t j = 0; j < dim; ++j)
                CHECK(outcome.bss[j] ==
                      doctest::Approx(outcome.tss[j] - outcome.wss[j]).epsilon(1e-6));
            CHECK(outcome.bss_norm >= 0.0);
        }
        // mean centroids minimize the summed wss, so the total never exceeds tss
        auto km = kmeans2(pts, trial);
        double total_wss = 0, total_tss = 0;
        for (std::size_t j = 0; j < dim; ++j) {
            total_wss += km.wss[j];
            total_tss += km.tss[j];
        }
        CHECK(total_wss <= total_tss + 1e-6);
    }
}

TEST_CASE("kmedians2 uses per-dimension medians") {
    auto outcome = kmedians2(points_from({{0.f}, {1.f}, {10.f}}), 2);
    // near cluster {0,1} centroid at median 0.5, far cluster at 10
    std::vector<double> centroids{outcome.centroids(0, 0), outcome.centroids(1, 0)};
    std::sort(centroids.begin(), centroids.end());
    CHECK(centroids[0] == doctest::Approx(0.5));
    CHECK(centroids[1] == doctest::Approx(10.0));
}

TEST_CASE("outlier removal keeps everything for unmixed groups") {
    auto pts = points_from({{1.f, 0.f}, {1.f, 0.1f}, {0.9f, 0.f}});
    auto kept = remove_outliers(RemovalStrategy::kmeans, pts, {}, 5);
    CHECK(kept == std::vector<int>{0, 1, 2});
}

TEST_CASE("kmeans strategy drops the far singleton from a mixed group") {
    auto pts = points_from({{0.f}, {0.1f}, {0.05f}, {-0.1f}, {10.f}});
    for (auto s : {RemovalStrategy::kmeans, RemovalStrategy::kmedians}) {
        auto kept = remove_outliers(s, pts, {}, 5);
        CHECK(kept == std::vector<int>{0, 1, 2, 3});
    }
}

TEST_CASE("gmm strategy keeps members within one mahalanobis unit") {
    auto pts = points_from({{0.f}, {0.1f}, {-0.1f}, {0.05f}, {10.f}});
    auto kept = remove_outliers(RemovalStrategy::gmm_mahalanobis, pts, {}, 5);
    CHECK(std::find(kept.begin(), kept.end(), 4) == kept.end());
    CHECK(kept.size() == 4);
}

TEST_CASE("centroid threshold drops members far from the mean distance") {
    auto pts = points_from({{0.f}, {0.1f}, {-0.1f}, {0.05f}, {10.f}});
    auto kept = remove_outliers(RemovalStrategy::centroid_threshold, pts, {}, 5);
    CHECK(std::find(kept.begin(), kept.end(), 4) == kept.end());
}

TEST_CASE("min_connection keeps well-connected members but spares cliques") {
    // star: center 0 connected to 1..3, leaves degree 1
    std::vector<std::uint8_t> star(16, 0);
    for (int leaf = 1; leaf < 4; ++leaf) star[std::size_t(leaf)] = star[std::size_t(leaf) * 4] = 1;
    auto pts = points_from({{0.f}, {0.f}, {0.f}, {0.f}});
    auto kept = remove_outliers(RemovalStrategy::min_connection, pts, star, 1);
    CHECK(kept == std::vector<int>{0});

    // clique: every degree equals n-1, the guard keeps everyone
    std::vector<std::uint8_t> clique(16, 1);
    for (int i = 0; i < 4; ++i) clique[std::size_t(i) * 4 + std::size_t(i)] = 0;
    CHECK(remove_outliers(RemovalStrategy::min_connection, pts, clique, 1) ==
          std::vector<int>{0, 1, 2, 3});

    CHECK_THROWS(remove_outliers(RemovalStrategy::min_connection, pts,
                                 std::vector<std::uint8_t>(9, 0), 1));
}

TEST_CASE("removal never returns an empty roster") {
    auto pts = points_from({{0.f}, {100.f}});
    for (auto s : {RemovalStrategy::kmeans, RemovalStrategy::kmedians,
                   RemovalStrategy::gmm_mahalanobis, RemovalStrategy::centroid_threshold}) {
        auto kept = remove_outliers(s, pts, {}, 9);
        CHECK(!kept.empty());
    }
}

TEST_CASE("group_vector averages kept rows") {
    auto pts = points_from({{1.f, 0.f}, {0.f, 1.f}, {9.f, 9.f}});
    auto v = group_vector(pts, {0, 1});
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(0.5));
    CHECK(v[1] == doctest::Approx(0.5));
    CHECK_THROWS(group_vector(pts, {}));
}

TEST_CASE("fc classifier separates a linearly separable set") {
    std::mt19937 rng{4};
    std::normal_distribution<float> noise(0.f, 0.05f);
    std::vector<std::vector<float>> vecs;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        int y = i % 2;
        vecs.push_back({(y ? 1.f : -1.f) + noise(rng), (y ? 1.f : -1.f) + noise(rng)});
        labels.push_back(y);
    }
    FcTrainConfig cfg;
    cfg.epochs = 500;
    cfg.lr = 0.05;
    auto model = train_fc(vecs, labels, cfg, 2);
    int correct = 0;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        correct += (model.score(vecs[i]) >= 0.5f ? 1 : 0) == labels[i];
    CHECK(correct == 20);
}

TEST_CASE("zero-weight fc scores 0.5") {
    FcModel model;
    model.layer = Linear<float>(2, 1);
    model.in_dim = 2;
    CHECK(model.score({3.f, -1.f}) == doctest::Approx(0.5));
}

TEST_CASE("single-class training falls back to majority with a warning") {
    std::vector<std::vector<float>> vecs{{1.f}, {2.f}};
    auto fraud_only = train_fc(vecs, {1, 1}, FcTrainConfig{}, 1);
    CHECK(fraud_only.fallback);
    CHECK(fraud_only.score({0.f}) == doctest::Approx(1.0));
    auto genuine_only = train_fc(vecs, {0, 0}, FcTrainConfig{}, 1);
    CHECK(genuine_only.fallback);
    CHECK(genuine_only.score({0.f}) == doctest::Approx(0.0));
}

TEST_CASE("strategy names round trip") {
    for (auto s : {RemovalStrategy::kmeans, RemovalStrategy::kmedians,
                   RemovalStrategy::gmm_mahalanobis, RemovalStrategy::centroid_threshold,
                   RemovalStrategy::min_connection})
        CHECK(parse_strategy(strategy_name(s)) == s);
    CHECK_THROWS(parse_strategy("voronoi"));
}
