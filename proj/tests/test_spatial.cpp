#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "groupsleuth/spatial.hpp"
#include "helpers.hpp"

using namespace groupsleuth;

namespace {

std::vector<std::uint8_t> path3() {
    // a-b-c path over indices 0,1,2
    std::vector<std::uint8_t> adj(9, 0);
    adj[0 * 3 + 1] = adj[1 * 3 + 0] = 1;
    adj[1 * 3 + 2] = adj[2 * 3 + 1] = 1;
    return adj;
}

std::vector<std::uint8_t> clique(int n) {
    std::vector<std::uint8_t> adj(std::size_t(n) * std::size_t(n), 1);
    for (int i = 0; i < n; ++i) adj[std::size_t(i) * std::size_t(n) + std::size_t(i)] = 0;
    return adj;
}

std::vector<float> rep(int dim, float first) {
    std::vector<float> v(std::size_t(dim), 0.f);
    v[0] = first;
    return v;
}

SpatialExample example(const std::vector<std::uint8_t>& adj, int n, int rep_dim, float first) {
    SpatialExample ex;
    ex.n = n;
    ex.adj = adj;
    ex.reps.assign(std::size_t(n), rep(rep_dim, first));
    return ex;
}

}  // namespace

TEST_CASE("order_nodes runs BFS from the highest-degree node with index ties") {
    auto pi = order_nodes(path3(), 3);
    CHECK(pi == std::vector<int>{1, 0, 2});  // 1 has degree 2; neighbors by index

    std::vector<int> given{2, 0, 1};
    CHECK(order_nodes(path3(), 3, OrderStrategy::given, &given) == given);
    std::vector<int> bad{0, 1};
    CHECK_THROWS(order_nodes(path3(), 3, OrderStrategy::given, &bad));
    CHECK_THROWS(order_nodes(path3(), 3, OrderStrategy::given, nullptr));
    CHECK_THROWS(order_nodes({}, 0));
}

TEST_CASE("to_sequence closed forms") {
    std::vector<int> id{0, 1, 2};
    auto seq = to_sequence(path3(), 3, id);
    REQUIRE(seq.size() == 3);
    CHECK(seq[0].empty());
    CHECK(seq[1] == std::vector<std::uint8_t>{1});
    CHECK(seq[2] == std::vector<std::uint8_t>{0, 1});

    // empty graph on 3 nodes
    auto zero = to_sequence(std::vector<std::uint8_t>(9, 0), 3, id);
    CHECK(zero[1] == std::vector<std::uint8_t>{0});
    CHECK(zero[2] == std::vector<std::uint8_t>{0, 0});

    CHECK_THROWS(to_sequence(path3(), 3, std::vector<int>{0, 1}));
    CHECK_THROWS(from_sequence({{}, {}}, std::vector<int>{0, 1}));  // bad lengths
}

TEST_CASE("sequence round trip over random graphs and permutations") {
    std::mt19937 rng{99};
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + int(rng() % 7);  // up to 8
        std::vector<std::uint8_t> adj(std::size_t(n) * std::size_t(n), 0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 2) {
                    adj[std::size_t(i) * std::size_t(n) + std::size_t(j)] = 1;
                    adj[std::size_t(j) * std::size_t(n) + std::size_t(i)] = 1;
                }
        std::vector<int> pi(static_cast<std::size_t>(n));
        std::iota(pi.begin(), pi.end(), 0);
        std::shuffle(pi.begin(), pi.end(), rng);
        CHECK(from_sequence(to_sequence(adj, n, pi), pi) == adj);
    }
}

TEST_CASE("zero-epoch training equals fresh initialization") {
    SpatialTrainConfig cfg;
    cfg.epochs = 0;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    auto model = train_hinrnn({example(path3(), 3, 5, 1.f)}, cfg, 17);
    HinRnnModel fresh(8, 5);
    std::mt19937 rng{std::uint32_t(17)};
    fresh.init_params(rng);
    std::vector<float> got, want;
    model.visit("m", [&](const std::string&, std::vector<float>& v, std::size_t, std::size_t) {
        got.insert(got.end(), v.begin(), v.end());
    });
    fresh.visit("m", [&](const std::string&, std::vector<float>& v, std::size_t, std::size_t) {
        want.insert(want.end(), v.begin(), v.end());
    });
    CHECK(got == want);
    CHECK(model.trained);
}

TEST_CASE("training is deterministic per seed") {
    SpatialTrainConfig cfg;
    cfg.epochs = 20;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    std::vector<SpatialExample> exs{example(path3(), 3, 5, 1.f), example(clique(3), 3, 5, 1.f)};
    auto a = train_hinrnn(exs, cfg, 4);
    auto b = train_hinrnn(exs, cfg, 4);
    std::vector<float> va, vb;
    a.visit("m", [&](const std::string&, std::vector<float>& v, std::size_t, std::size_t) {
        va.insert(va.end(), v.begin(), v.end());
    });
    b.visit("m", [&](const std::string&, std::vector<float>& v, std::size_t, std::size_t) {
        vb.insert(vb.end(), v.begin(), v.end());
    });
    CHECK(va == vb);
}

TEST_CASE("edge log-likelihoods sum to the negative slice loss") {
    SpatialTrainConfig cfg;
    cfg.epochs = 0;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    auto ex = example(clique(4), 4, 5, 1.f);
    auto model = train_hinrnn({ex}, cfg, 23);
    auto [loss, edges] = hinrnn_slice_loss(model, ex);
    CHECK(edges == 6);
    auto ll = hinrnn_edge_loglik(model, ex);
    REQUIRE(ll.size() == 6);
    double total = std::accumulate(ll.begin(), ll.end(), 0.0);
    CHECK(std::abs(total + loss) < 1e-5);
}

TEST_CASE("refine requires a trained model and rejects oversized rosters") {
    HinRnnModel model(8, 5);
    CHECK_THROWS(refine_slice(model, example(path3(), 3, 5, 1.f)));
    SpatialTrainConfig cfg;
    cfg.epochs = 0;
    cfg.m_max = 2;
    cfg.rep_dim = 5;
    auto trained = train_hinrnn({example(clique(2), 2, 5, 1.f)}, cfg, 1);
    CHECK_THROWS(hinrnn_slice_loss(trained, example(path3(), 3, 5, 1.f)));
}

TEST_CASE("overfit on a single clique regenerates it exactly") {
    SpatialTrainConfig cfg;
    cfg.epochs = 300;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    cfg.lr = 0.01;
    auto ex = example(clique(3), 3, 5, 1.f);
    auto model = train_hinrnn({ex}, cfg, 7);
    CHECK(refine_slice(model, ex) == ex.adj);
}

TEST_CASE("model separates clique slices from empty slices by representation") {
    // reps with first component 1 pair with cliques, 0 with empty graphs
    std::vector<SpatialExample> pool;
    for (int k = 0; k < 20; ++k) {
        pool.push_back(example(clique(4), 4, 5, 1.f));
        pool.push_back(example(std::vector<std::uint8_t>(16, 0), 4, 5, 0.f));
    }
    SpatialTrainConfig cfg;
    cfg.epochs = 500;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    cfg.lr = 0.01;
    auto model = train_hinrnn(pool, cfg, 3);
    CHECK(hinrnn_mean_edge_bce(model, pool) < 0.25);
    CHECK(refine_slice(model, pool[0]) == pool[0].adj);
    CHECK(refine_slice(model, pool[1]) == pool[1].adj);
}

TEST_CASE("size-2 rosters produce a single-bit sequence") {
    auto ex = example(clique(2), 2, 5, 1.f);
    SpatialTrainConfig cfg;
    cfg.epochs = 0;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    auto model = train_hinrnn({ex}, cfg, 2);
    auto [loss, edges] = hinrnn_slice_loss(model, ex);
    CHECK(edges == 1);
    auto refined = refine_slice(model, ex);
    REQUIRE(refined.size() == 4);
    CHECK(refined[0] == 0);
    CHECK(refined[3] == 0);
    CHECK(refined[1] == refined[2]);
}

TEST_CASE("a zero-weight model keeps every edge at the 0.5 tie") {
    SpatialTrainConfig cfg;
    cfg.epochs = 0;
    cfg.m_max = 8;
    cfg.rep_dim = 5;
    auto model = train_hinrnn({example(clique(3), 3, 5, 1.f)}, cfg, 5);
    model.visit("m", [&](const std::string&, std::vector<float>& v, std::size_t, std::size_t) {
        std::fill(v.begin(), v.end(), 0.f);
    });
    auto refined = refine_slice(model, example(std::vector<std::uint8_t>(9, 0), 3, 5, 0.f));
    CHECK(refined == clique(3));
}
