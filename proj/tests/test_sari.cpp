#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "test_support.hpp"
#include "tsdiag/error.hpp"
#include "tsdiag/sari.hpp"

using namespace tsdiag;

namespace {

std::vector<TokenSeq> refs_of(std::initializer_list<const char*> lines) {
  std::vector<TokenSeq> out;
  for (const char* l : lines) out.push_back(normalize_line(l));
  return out;
}

}  // namespace

TEST_SUITE("sari") {

TEST_CASE("ngram_multiset") {
  auto uni = ngram_multiset(make_tokens({"a", "b", "a"}), 1);
  CHECK(uni == NgramCounts{{"a", 2}, {"b", 1}});
  auto bi = ngram_multiset(make_tokens({"a", "b", "c"}), 2);
  CHECK(bi == NgramCounts{{"a b", 1}, {"b c", 1}});
  CHECK(ngram_multiset(make_tokens({"a"}), 2).empty());
  CHECK_THROWS_AS(ngram_multiset(make_tokens({"a"}), 0), Error);
}

TEST_CASE("copying the source against itself scores 100") {
  const auto s = normalize_line("the cat sat");
  auto score = sari_sentence(s, s, std::vector<TokenSeq>{s});
  CHECK(score.sari == doctest::Approx(100.0));
  CHECK(score.f_keep == doctest::Approx(100.0));
  // Nothing to add or delete at any order: both skipped everywhere.
  for (const auto& level : score.per_n) {
    CHECK_FALSE(level.add.has_value());
    CHECK_FALSE(level.del.has_value());
  }
  CHECK(score.per_n[2].keep.has_value());
  CHECK_FALSE(score.per_n[3].keep.has_value());
}

TEST_CASE("output unrelated to source and references") {
  auto score = sari_sentence(normalize_line("a b"), normalize_line("x y"), refs_of({"a c"}));
  CHECK(score.f_keep == 0.0);
  CHECK(score.f_add == 0.0);
  // Unigrams: deleting b is right, deleting a is wrong (1/2); bigram "a b": 1.
  CHECK(score.p_del == doctest::Approx(75.0));
  CHECK(score.sari == doctest::Approx(score.p_del / 3.0));
}

TEST_CASE("committed fixtures agree with the reference scorer") {
  std::ifstream in(std::string(TSDIAG_FIXTURE_DIR) + "/sari_cases.json");
  REQUIRE(in);
  const auto cases = nlohmann::json::parse(in);
  REQUIRE(cases.size() == 10);
  for (const auto& c : cases) {
    CAPTURE(c["name"].get<std::string>());
    std::vector<TokenSeq> refs;
    for (const auto& r : c["references"]) refs.push_back(normalize_line(r.get<std::string>()));
    auto score = sari_sentence(normalize_line(c["source"].get<std::string>()),
                               normalize_line(c["output"].get<std::string>()), refs);
    const auto& e = c["expected"];
    CHECK(std::abs(score.sari - e["sari"].get<double>()) <= 1e-6);
    CHECK(std::abs(score.f_add - e["f_add"].get<double>()) <= 1e-6);
    CHECK(std::abs(score.f_keep - e["f_keep"].get<double>()) <= 1e-6);
    CHECK(std::abs(score.p_del - e["p_del"].get<double>()) <= 1e-6);
    CHECK(std::abs(score.sari - (score.f_add + score.f_keep + score.p_del) / 3.0) <= 1e-9);
  }
}

TEST_CASE("range and reference-order invariance on random cases") {
  rng::Xoshiro256 gen(2718);
  for (int i = 0; i < 2000; ++i) {
    auto src = testing::random_tokens(gen, 10, 6);
    auto out = testing::random_tokens(gen, 10, 6);
    std::vector<TokenSeq> refs;
    const std::size_t num_refs = 1 + gen.bounded(4);
    for (std::size_t r = 0; r < num_refs; ++r) refs.push_back(testing::random_tokens(gen, 10, 6));
    auto score = sari_sentence(src, out, refs);
    CHECK(score.sari >= 0.0);
    CHECK(score.sari <= 100.0);
    for (double v : {score.f_add, score.f_keep, score.p_del}) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }
    std::reverse(refs.begin(), refs.end());
    CHECK(sari_sentence(src, out, refs).sari == doctest::Approx(score.sari).epsilon(1e-12));
  }
}

TEST_CASE("f_add does not decrease as the output picks up reference n-grams") {
  const auto src = normalize_line("the feline rested upon the rug");
  const auto refs = refs_of({"the cat sat on the mat", "a cat sat on a mat"});
  const std::vector<const char*> outputs = {
      "the feline rested upon the rug",
      "the cat rested upon the rug",
      "the cat sat upon the rug",
      "the cat sat on the rug",
      "the cat sat on the mat",
  };
  double previous = -1.0;
  for (const char* o : outputs) {
    const double add = sari_sentence(src, normalize_line(o), refs).f_add;
    CHECK(add >= previous);
    previous = add;
  }
}

TEST_CASE("sari_sentence requires references") {
  CHECK_THROWS_AS(sari_sentence(make_tokens({"a"}), make_tokens({"a"}), {}), Error);
}

TEST_CASE("corpus score is the mean of sentence scores") {
  const auto s = normalize_line("the cat sat");
  std::vector<TokenSeq> sources{s}, outputs{s};
  std::vector<std::vector<TokenSeq>> refs{{s}};
  auto single = sari_corpus(sources, outputs, refs);
  CHECK(single.mean.sari == sari_sentence(s, s, refs[0]).sari);

  // 100 and 25 -> 62.5
  sources.push_back(normalize_line("a b"));
  outputs.push_back(normalize_line("x y"));
  refs.push_back(refs_of({"a c"}));
  auto two = sari_corpus(sources, outputs, refs);
  CHECK(two.mean.sari == doctest::Approx(62.5));
  CHECK(two.sentences.size() == 2);

  std::swap(sources[0], sources[1]);
  std::swap(outputs[0], outputs[1]);
  std::swap(refs[0], refs[1]);
  CHECK(sari_corpus(sources, outputs, refs).mean.sari == two.mean.sari);

  outputs.pop_back();
  CHECK_THROWS_AS(sari_corpus(sources, outputs, refs), Error);
}

TEST_CASE("parallel corpus scoring is bit-identical to the serial path") {
  rng::Xoshiro256 gen(77);
  std::vector<TokenSeq> sources, outputs;
  std::vector<std::vector<TokenSeq>> refs;
  for (int i = 0; i < 3000; ++i) {
    sources.push_back(testing::random_tokens(gen, 15, 8));
    outputs.push_back(testing::random_tokens(gen, 15, 8));
    refs.push_back({testing::random_tokens(gen, 15, 8), testing::random_tokens(gen, 15, 8)});
  }
  auto par = sari_corpus(sources, outputs, refs);
  auto ser = sari_corpus_serial(sources, outputs, refs);
  CHECK(par.mean.sari == ser.mean.sari);
  CHECK(par.mean.f_add == ser.mean.f_add);
  CHECK(par.mean.f_keep == ser.mean.f_keep);
  CHECK(par.mean.p_del == ser.mean.p_del);
}

TEST_CASE("stable_mean") {
  CHECK(stable_mean(std::vector<double>{}) == 0.0);
  CHECK(stable_mean(std::vector<double>{100.0, 0.0}) == 50.0);
  std::vector<double> many(1000, 0.1);
  CHECK(stable_mean(many) == doctest::Approx(0.1).epsilon(1e-15));
}

}  // TEST_SUITE
