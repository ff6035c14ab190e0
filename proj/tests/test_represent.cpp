#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "groupsleuth/corpus.hpp"
#include "groupsleuth/embedding.hpp"
#include "groupsleuth/represent.hpp"
#include "helpers.hpp"

using namespace groupsleuth;

namespace {

EmbeddingTable manual_table() {
    EmbeddingTable table;
    table.vocab = {{"a", 0}, {"b", 1}, {"c", 2}};
    table.vectors = Tensor2(3, 2);
    table.vectors.data = {1.f, 0.f, 0.f, 1.f, 0.f, 2.f};
    return table;
}

Review make_review(const std::string& id, const std::string& user, int rating,
                   const std::string& text) {
    return {id, user, "i1", rating, parse_date("2010-01-01"), ReviewLabel::genuine, text};
}

}  // namespace

TEST_CASE("sentence_sowe averages in-vocabulary embeddings") {
    auto table = manual_table();
    auto v = sentence_sowe({"a", "b"}, table);
    REQUIRE(v.has_value());
    CHECK((*v)[0] == doctest::Approx(0.5));
    CHECK((*v)[1] == doctest::Approx(0.5));

    auto single = sentence_sowe({"c"}, table);
    REQUIRE(single.has_value());
    CHECK((*single)[0] == doctest::Approx(0.0));
    CHECK((*single)[1] == doctest::Approx(2.0));

    // permutation invariance, unknown tokens skipped
    auto fwd = sentence_sowe({"a", "zzz", "c"}, table);
    auto rev = sentence_sowe({"c", "a"}, table);
    REQUIRE(fwd.has_value());
    REQUIRE(rev.has_value());
    CHECK(*fwd == *rev);

    CHECK(!sentence_sowe({"zzz", "qqq"}, table).has_value());
    CHECK(!sentence_sowe({}, table).has_value());
}

TEST_CASE("reviewer_vector max-pools sentences and computes the negative ratio") {
    auto table = manual_table();
    Review r1 = make_review("r1", "u1", 1, "a.");
    Review r2 = make_review("r2", "u1", 2, "c.");
    Review r3 = make_review("r3", "u1", 5, "a b.");
    Review r4 = make_review("r4", "u1", 5, "b.");
    std::vector<const Review*> reviews{&r1, &r2, &r3, &r4};
    auto rv = reviewer_vector("u1", reviews, table);
    CHECK(rv.reviewer_id == "u1");
    REQUIRE(rv.semantic.size() == 2);
    CHECK(rv.semantic[0] == doctest::Approx(1.0));  // max over {1, 0, 0.5, 0}
    CHECK(rv.semantic[1] == doctest::Approx(2.0));  // max over {0, 2, 0.5, 1}
    CHECK(rv.nr == doctest::Approx(0.5));           // ratings 1,2 out of 4
    REQUIRE(rv.v.size() == 3);
    CHECK(rv.v[0] == rv.semantic[0]);
    CHECK(rv.v[2] == rv.nr);

    // review order does not matter
    std::vector<const Review*> shuffled{&r4, &r2, &r1, &r3};
    auto rv2 = reviewer_vector("u1", shuffled, table);
    CHECK(rv2.v == rv.v);
}

TEST_CASE("negative ratio is monotone in the number of low ratings") {
    auto table = manual_table();
    Review lo1 = make_review("r1", "u", 1, "a.");
    Review lo2 = make_review("r2", "u", 2, "a.");
    Review hi1 = make_review("r3", "u", 5, "a.");
    Review hi2 = make_review("r4", "u", 4, "a.");
    std::vector<const Review*> mild{&lo1, &hi1, &hi2};
    std::vector<const Review*> harsh{&lo1, &lo2, &hi1};
    CHECK(reviewer_vector("u", harsh, table).nr > reviewer_vector("u", mild, table).nr);
}

TEST_CASE("reviewer_vector rejects reviewers with no usable sentences") {
    auto table = manual_table();
    Review oov = make_review("r1", "u1", 5, "zzz qqq.");
    std::vector<const Review*> reviews{&oov};
    try {
        reviewer_vector("u1", reviews, table);
        CHECK(false);
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("u1") != std::string::npos);
    }
}

TEST_CASE("compute_reviewer_vectors covers every reviewer with zero fallback") {
    auto table = manual_table();
    Corpus corpus;
    corpus.reviews.push_back(make_review("r1", "u1", 5, "a b."));
    corpus.reviews.push_back(make_review("r2", "u2", 1, "zzz."));  // fully OOV
    corpus.rebuild_indices();
    auto vecs = compute_reviewer_vectors(corpus, table);
    REQUIRE(vecs.size() == 2);
    const auto& u1 = vecs[std::size_t(corpus.reviewer_index.at("u1"))];
    const auto& u2 = vecs[std::size_t(corpus.reviewer_index.at("u2"))];
    CHECK(u1.reviewer_id == "u1");
    CHECK(u1.semantic[0] == doctest::Approx(0.5));
    CHECK(u2.semantic == std::vector<float>(2, 0.f));
    CHECK(u2.nr == doctest::Approx(1.0));
    CHECK(u2.v.size() == 3);
}

TEST_CASE("windowed reviewer vector falls back to the all-time vector") {
    auto table = manual_table();
    Corpus corpus;
    corpus.reviews.push_back(make_review("r1", "u1", 5, "a."));
    Review late = make_review("r2", "u1", 1, "c.");
    late.date = parse_date("2010-03-01");
    corpus.reviews.push_back(late);
    corpus.rebuild_indices();
    auto all = compute_reviewer_vectors(corpus, table);
    int idx = corpus.reviewer_index.at("u1");
    // window containing only the first review
    auto early = reviewer_vector_windowed(corpus, idx, parse_date("2010-01-01"),
                                          parse_date("2010-01-28"), table, all[std::size_t(idx)]);
    CHECK(early.semantic[0] == doctest::Approx(1.0));
    CHECK(early.semantic[1] == doctest::Approx(0.0));
    CHECK(early.nr == doctest::Approx(0.0));
    // window with no reviews at all: all-time fallback
    auto empty = reviewer_vector_windowed(corpus, idx, parse_date("2011-01-01"),
                                          parse_date("2011-01-28"), table, all[std::size_t(idx)]);
    CHECK(empty.v == all[std::size_t(idx)].v);
}

TEST_CASE("reviewer vector file round trip") {
    testutil::TempDir dir("gs_test_represent");
    auto table = manual_table();
    Corpus corpus;
    corpus.reviews.push_back(make_review("r1", "u1", 5, "a b."));
    corpus.reviews.push_back(make_review("r2", "u2", 1, "c."));
    corpus.rebuild_indices();
    auto vecs = compute_reviewer_vectors(corpus, table);
    write_reviewer_vectors(vecs, dir.file("rv.tsv"));
    auto back = load_reviewer_vectors(dir.file("rv.tsv"));
    REQUIRE(back.size() == vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        CHECK(back[i].reviewer_id == vecs[i].reviewer_id);
        REQUIRE(back[i].v.size() == vecs[i].v.size());
        for (std::size_t j = 0; j < vecs[i].v.size(); ++j)
            CHECK(back[i].v[j] == doctest::Approx(vecs[i].v[j]).epsilon(1e-5));
    }
}
