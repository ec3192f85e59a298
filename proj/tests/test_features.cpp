#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sbr/errors.hpp"
#include "sbr/features.hpp"

using namespace sbr;

using Docs = std::vector<TokenSequence>;

TEST_CASE("vocabulary counting and ranking") {
  const Docs docs{{"a", "b"}, {"b", "c"}};
  const auto v = build_vocabulary(docs, 10);
  CHECK(v.terms() == std::vector<std::string>{"b", "a", "c"});
  CHECK(v.doc_freq() == std::vector<std::size_t>{2, 1, 1});
  CHECK(v.doc_count() == 2);
  CHECK(build_vocabulary(docs, 1).terms() == std::vector<std::string>{"b"});
  CHECK(build_vocabulary(Docs{{"a"}, {"b"}}, 1).terms() == std::vector<std::string>{"a"});
}

TEST_CASE("vocabulary errors") {
  CHECK_THROWS_AS(build_vocabulary(Docs{}, 10), DataError);
  CHECK_THROWS_AS(build_vocabulary(Docs{{"a"}}, 0), DataError);
  CHECK_THROWS_AS(Vocabulary({"a", "a"}, {1, 1}, 2, RankingPolicy::document_frequency), DataError);
  CHECK_THROWS_AS(Vocabulary({"a"}, {3}, 2, RankingPolicy::document_frequency), DataError);
}

TEST_CASE("corpus-tfidf ranking scores by the largest per-document tf-idf") {
  // a: N=1, max f=3 -> 3 ln 3; b: N=2, max f=1 -> ln 1.5; c: N=3 -> 0
  const Docs docs{{"a", "a", "a", "b", "c"}, {"b", "c"}, {"c"}};
  const auto v = build_vocabulary(docs, 10, RankingPolicy::corpus_tfidf);
  CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(build_vocabulary(docs, 10).terms() == std::vector<std::string>{"c", "b", "a"});
}

TEST_CASE("vectorize examples") {
  const Docs docs{{"overflow", "overflow"}, {"ui", "glitch"}};
  const auto v = build_vocabulary(docs, 10);
  const auto i = *v.index_of("overflow");
  CHECK(vectorize({"overflow", "overflow"}, v, FeatureScheme::tfidf).values[i] ==
        doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(vectorize({"overflow", "overflow"}, v, FeatureScheme::tfidf).values[i] == 2.0 * std::log(2.0));
  CHECK(vectorize({"ui"}, v, FeatureScheme::bf).values[i] == 0.0);
  CHECK(vectorize({"overflow", "overflow", "overflow"}, v, FeatureScheme::bf).values[i] == 1.0);
  CHECK(vectorize({"unknown"}, v, FeatureScheme::tf).values == std::vector<double>(v.size(), 0.0));

  const auto everywhere = build_vocabulary(Docs{{"x", "y"}, {"x"}}, 10);
  CHECK(vectorize({"x", "x", "x"}, everywhere, FeatureScheme::tfidf).values[*everywhere.index_of("x")] == 0.0);
  CHECK(vectorize({"x"}, v, FeatureScheme::tf).vocab_id == v.fingerprint());
}

TEST_CASE("vectorize matches the brute-force oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto docs = oracle::random_docs(rng, 10, 30);
    const auto v = build_vocabulary(docs, 1 + rng.below(40));
    CHECK(v.terms() == oracle::top_terms_by_df(docs, v.size()));
    for (const auto& d : docs)
      for (auto s : {FeatureScheme::bf, FeatureScheme::tf, FeatureScheme::tfidf}) {
        const auto got = vectorize(d, v, s).values;
        const auto want = oracle::vectorize(d, docs, v.terms(), s);
        REQUIRE(got.size() == want.size());
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(std::abs(got[j] - want[j]) <= 1e-12);
      }
  }
}

TEST_CASE("scheme relations: BF = sign(TF), TF-IDF = TF * idf") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = oracle::random_docs(rng, 10, 30);
    const auto v = build_vocabulary(docs, 100);
    for (const auto& d : docs) {
      const auto bf = vectorize(d, v, FeatureScheme::bf).values;
      const auto tf = vectorize(d, v, FeatureScheme::tf).values;
      const auto tfidf = vectorize(d, v, FeatureScheme::tfidf).values;
      for (std::size_t j = 0; j < v.size(); ++j) {
        CHECK(bf[j] == (tf[j] > 0 ? 1.0 : 0.0));
        CHECK(tfidf[j] == tf[j] * v.idf(j));
        CHECK(tfidf[j] >= 0.0);
      }
    }
  }
}

TEST_CASE("a document containing every term lowers every idf") {
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    auto docs = oracle::random_docs(rng, 10, 30);
    const auto before = build_vocabulary(docs, 1000);
    docs.push_back(before.terms());
    const auto after = build_vocabulary(docs, 1000);
    for (std::size_t j = 0; j < before.size(); ++j) {
      const auto k = *after.index_of(before.terms()[j]);
      if (before.idf(j) == 0.0)
        CHECK(after.idf(k) == 0.0);
      else
        CHECK(after.idf(k) < before.idf(j));
    }
  }
}

TEST_CASE("vectorize_corpus serial and parallel agree") {
  Rng rng(31);
  Docs docs;
  for (int i = 0; i < 500; ++i) {
    TokenSequence d;
    for (int j = 0; j < 30; ++j) d.push_back("w" + std::to_string(rng.below(300)));
    docs.push_back(d);
  }
  const auto v = build_vocabulary(docs, 200);
  for (auto s : {FeatureScheme::bf, FeatureScheme::tf, FeatureScheme::tfidf}) {
    const auto a = vectorize_corpus(docs, v, s, Execution::serial);
    const auto b = vectorize_corpus(docs, v, s, Execution::parallel);
    CHECK(a == b);
    CHECK(a.rows() == docs.size());
    CHECK(a.cols() == v.size());
  }
}

TEST_CASE("feature CSV export") {
  const Docs docs{{"a", "b"}, {"b"}};
  const auto v = build_vocabulary(docs, 10);
  const auto m = vectorize_corpus(docs, v, FeatureScheme::tf);
  std::ostringstream out;
  write_feature_csv(out, v, m, std::vector<int>{1, 0});
  CHECK(out.str() == "b,a,label\n1,1,1\n1,0,0\n");
}

TEST_CASE("scheme and policy names") {
  CHECK(parse_feature_scheme("tf-idf") == FeatureScheme::tfidf);
  CHECK(parse_feature_scheme("bf") == FeatureScheme::bf);
  CHECK_FALSE(parse_feature_scheme("bm25").has_value());
  CHECK(parse_ranking_policy("df") == RankingPolicy::document_frequency);
  CHECK(parse_ranking_policy("tfidf") == RankingPolicy::corpus_tfidf);
}
