#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "groupsleuth/eval.hpp"
#include "helpers.hpp"

using namespace groupsleuth;

namespace {

// Dense 3x3 symmetric eigen-decomposition oracle (Jacobi) for PCA checks.
void jacobi_top_axes(Tensor<double> a, std::vector<double>& top, std::vector<double>& second) {
    std::size_t n = a.rows;
    Tensor<double> v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep)
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-15) continue;
                double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    top.resize(n);
    second.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        top[i] = v(i, order[0]);
        second[i] = v(i, order[1]);
    }
}

Tensor<double> covariance(const Tensor2& pts) {
    std::size_t n = pts.rows, d = pts.cols;
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) mean[k] += double(pts(i, k));
    for (auto& m : mean) m /= double(n);
    Tensor<double> cov(d, d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                cov(a, b) += (double(pts(i, a)) - mean[a]) * (double(pts(i, b)) - mean[b]);
    for (auto& x : cov.data) x /= double(n);
    return cov;
}

double abs_cos(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::abs(num) / std::sqrt(na * nb);
}

}  // namespace

TEST_CASE("metrics worked example") {
    std::vector<int> pred{1, 1, 1, 1, 0, 0, 0}, truth{1, 1, 1, 0, 1, 1, 0};
    auto m = compute_metrics(pred, truth);
    CHECK(m.tp == 3);
    CHECK(m.fp == 1);
    CHECK(m.fn == 2);
    CHECK(m.tn == 1);
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.6));
    CHECK(m.f1 == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
    CHECK(m.precision_defined);
    CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
    CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
}

TEST_CASE("metrics edge cases") {
    auto perfect = compute_metrics({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.f1 == doctest::Approx(1.0));

    // no predicted positives, no true positives: everything undefined
    auto none = compute_metrics({0, 0}, {0, 0});
    CHECK(!none.precision_defined);
    CHECK(!none.recall_defined);
    CHECK(!none.f1_defined);
    CHECK(none.precision == doctest::Approx(0.0));
    CHECK(none.f1 == doctest::Approx(0.0));

    CHECK_THROWS(compute_metrics({1}, {1, 0}));
}

TEST_CASE("pca on a perfect line is rank deficient") {
    Tensor2 pts(6, 3);
    for (int i = 0; i < 6; ++i) {
        pts(std::size_t(i), 0) = float(i) * 1.f;
        pts(std::size_t(i), 1) = float(i) * 2.f;
        pts(std::size_t(i), 2) = float(i) * -1.f;
    }
    auto res = pca_project(pts);
    CHECK(res.degenerate);
    double var2 = 0;
    for (std::size_t i = 0; i < 6; ++i) var2 += double(res.projected(i, 1)) * double(res.projected(i, 1));
    CHECK(var2 < 1e-6);
    // first axis parallel to (1, 2, -1)
    std::vector<double> axis{double(res.axes(0, 0)), double(res.axes(0, 1)), double(res.axes(0, 2))};
    CHECK(abs_cos(axis, {1.0, 2.0, -1.0}) > 0.999);
}

TEST_CASE("pca axes match the dense eigenvector oracle") {
    std::mt19937 rng{71};
    std::normal_distribution<float> d(0.f, 1.f);
    Tensor2 pts(40, 3);
    for (std::size_t i = 0; i < 40; ++i) {
        float a = d(rng), b = d(rng), c = d(rng);
        pts(i, 0) = 3.f * a + 0.2f * c;
        pts(i, 1) = 1.5f * b;
        pts(i, 2) = 0.4f * c;
    }
    auto res = pca_project(pts);
    CHECK(!res.degenerate);
    std::vector<double> top, second;
    jacobi_top_axes(covariance(pts), top, second);
    std::vector<double> ax0{double(res.axes(0, 0)), double(res.axes(0, 1)), double(res.axes(0, 2))};
    std::vector<double> ax1{double(res.axes(1, 0)), double(res.axes(1, 1)), double(res.axes(1, 2))};
    CHECK(abs_cos(ax0, top) > 0.999);
    CHECK(abs_cos(ax1, second) > 0.999);
    // unit norms and orthogonality
    CHECK(std::abs(abs_cos(ax0, ax0) - 1.0) < 1e-9);
    double dot01 = ax0[0] * ax1[0] + ax0[1] * ax1[1] + ax0[2] * ax1[2];
    CHECK(std::abs(dot01) < 1e-5);
    double n0 = std::sqrt(ax0[0] * ax0[0] + ax0[1] * ax0[1] + ax0[2] * ax0[2]);
    CHECK(n0 == doctest::Approx(1.0).epsilon(1e-6));

    Tensor2 tiny(1, 3);
    CHECK_THROWS(pca_project(tiny));
}

TEST_CASE("silhouette prefers separated clusters") {
    Tensor2 separated(6, 2);
    Tensor2 interleaved(6, 2);
    std::vector<int> assign{0, 0, 0, 1, 1, 1};
    for (int i = 0; i < 3; ++i) {
        separated(std::size_t(i), 0) = float(i) * 0.1f;
        separated(std::size_t(i + 3), 0) = 10.f + float(i) * 0.1f;
        interleaved(std::size_t(i), 0) = float(i);
        interleaved(std::size_t(i + 3), 0) = float(i) + 0.5f;
    }
    double good = silhouette(separated, assign);
    double bad = silhouette(interleaved, assign);
    CHECK(good > 0.9);
    CHECK(good > bad);

    // single cluster has no between-distance: defined as zero
    CHECK(silhouette(separated, std::vector<int>(6, 0)) == doctest::Approx(0.0));
}

TEST_CASE("interaction report counts cross-label window contacts") {
    // u1..u3 form a planted fraud group; g1 is a genuine reviewer touching the
    // group in windows 2 and 5 only.
    Corpus corpus;
    std::int32_t epoch = parse_date("2012-01-01");
    auto add = [&](const std::string& u, ReviewLabel l, int day) {
        char rid[8];
        std::snprintf(rid, sizeof rid, "r%zu", corpus.reviews.size());
        corpus.reviews.push_back({rid, u, "i1", 5, epoch + day, l, "t."});
    };
    add("u1", ReviewLabel::fraud, 0);
    add("u2", ReviewLabel::fraud, 0);
    add("u3", ReviewLabel::fraud, 0);
    add("g1", ReviewLabel::genuine, 0);
    add("g1", ReviewLabel::genuine, 60);
    corpus.rebuild_indices();
    auto labels = derive_reviewer_labels(corpus);

    GroundTruth truth;
    truth.groups.push_back({"FG000", {"u1", "u2", "u3"}, true});

    int u1 = corpus.reviewer_index.at("u1"), u2 = corpus.reviewer_index.at("u2"),
        g1 = corpus.reviewer_index.at("g1");
    std::vector<CoReviewGraph> graphs(6);
    for (int w = 0; w < 6; ++w)
        graphs[std::size_t(w)].window = {w, epoch + w * 28, epoch + w * 28 + 27};
    graphs[2].edges = {{std::min(g1, u1), std::max(g1, u1)}};
    graphs[5].edges = {{std::min(u2, g1), std::max(u2, g1)},
                       {std::min(u1, u2), std::max(u1, u2)}};

    auto rows = interaction_report(corpus, graphs, truth, labels);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        if (r.window == 2 || r.window == 5) {
            CHECK(r.genuine_in_fraud == 1);  // g1 touches FG000 once per window
        } else {
            CHECK(r.genuine_in_fraud == 0);
        }
        CHECK(r.fraud_in_genuine == 0);  // no genuine group planted
    }
}

TEST_CASE("interaction report file has the expected header") {
    testutil::TempDir dir("gs_test_eval");
    write_interaction_report({{0, 1, 2}}, dir.file("ir.tsv"));
    auto content = testutil::read_file(dir.file("ir.tsv"));
    CHECK(content.find("#groupsleuth-interactions v1") == 0);
    CHECK(content.find("\t1\t2") != std::string::npos);
}
