#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ccattack/metrics.hpp"
#include "ccattack/rng.hpp"
#include "support/oracles.hpp"

using namespace ccattack;

namespace {

std::string random_sentence(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> kWords = {
      "the", "fast", "slow", "cache", "entry", "scan", "update",
      "value", "index", "node", "reads", "writes"};
  const std::size_t len = 1 + rng.index(max_len);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    if (i) out += ' ';
    out += kWords[rng.index(kWords.size())];
  }
  return out;
}

}  // namespace

TEST_CASE("text normalization lowercases and strips trailing punctuation") {
  CHECK(metrics::tokenize_text("Hello, World!") ==
        std::vector<std::string>{"hello", "world"});
  CHECK(metrics::tokenize_text("  a  b.c.  ") ==
        std::vector<std::string>{"a", "b.c"});
  CHECK(metrics::tokenize_text("...") == std::vector<std::string>{});
  CHECK(metrics::tokenize_text("") == std::vector<std::string>{});
}

TEST_CASE("sentence metrics agree with reference implementations") {
  Rng rng(4242);
  for (int i = 0; i < 100; ++i) {
    const std::string ref = random_sentence(rng, 12);
    const std::string cand =
        i % 5 == 0 ? ref : random_sentence(rng, 12);  // include identical pairs
    CAPTURE(ref);
    CAPTURE(cand);
    CHECK(metrics::bleu(ref, cand) ==
          doctest::Approx(oracles::bleu_ref(ref, cand)).epsilon(1e-6));
    CHECK(metrics::rouge_l(ref, cand) ==
          doctest::Approx(oracles::rouge_ref(ref, cand)).epsilon(1e-6));
    CHECK(metrics::meteor_lite(ref, cand) ==
          doctest::Approx(oracles::meteor_ref(ref, cand)).epsilon(1e-6));
  }
}

TEST_CASE("identical sentences score at the metric ceiling") {
  const std::string text = "sum the range from start to stop";
  CHECK(metrics::bleu(text, text) == doctest::Approx(100.0));
  CHECK(metrics::rouge_l(text, text) == doctest::Approx(100.0));
  // Exact METEOR identity: one chunk over m matches leaves 100 * (1 - 0.5/m^3).
  const double m = 7.0;
  CHECK(metrics::meteor_lite(text, text) ==
        doctest::Approx(100.0 * (1.0 - 0.5 / (m * m * m))));
}

TEST_CASE("disjoint and empty sentences score zero") {
  CHECK(metrics::bleu("alpha beta gamma", "delta epsilon zeta") == 0.0);
  CHECK(metrics::rouge_l("alpha beta", "gamma delta") == 0.0);
  CHECK(metrics::meteor_lite("alpha beta", "gamma delta") == 0.0);
  for (const char* empty : {"", "   ", "..."}) {
    CHECK(metrics::bleu("alpha", empty) == 0.0);
    CHECK(metrics::bleu(empty, "alpha") == 0.0);
    CHECK(metrics::rouge_l(empty, "alpha") == 0.0);
    CHECK(metrics::meteor_lite("alpha", empty) == 0.0);
  }
}

TEST_CASE("bleu applies the brevity penalty and add-one smoothing") {
  // Candidate = 3-token prefix of a 6-token reference: p1 = 1, p2 = 1,
  // p3 = (1+1)/(1+1), p4 skipped via the +1 smoothing over zero counts.
  const std::string ref = "one two three four five six";
  const std::string cand = "one two three";
  const double p3 = (1.0 + 1.0) / (1.0 + 1.0);
  const double p4 = 1.0;  // no 4-grams in a 3-token candidate: factor 1
  const double geo = std::exp((std::log(1.0) + std::log(1.0) + std::log(p3) +
                               std::log(p4)) / 4.0);
  const double bp = std::exp(1.0 - 6.0 / 3.0);
  CHECK(metrics::bleu(ref, cand) == doctest::Approx(100.0 * geo * bp));
}

TEST_CASE("bleu is zero when no unigram matches") {
  CHECK(metrics::bleu("aa bb cc dd", "ee ff gg hh") == 0.0);
}

TEST_CASE("corpus bleu pools n-gram statistics across sentences") {
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"the cache entry", "the cache entry"},
      {"scan the node index", "scan the node value"},
  };
  CHECK(metrics::corpus_bleu(pairs) > 0.0);
  CHECK(metrics::corpus_bleu({{"a b c d", "a b c d"}}) == doctest::Approx(100.0));
  CHECK(metrics::corpus_bleu({}) == 0.0);
  // Pooling is not averaging: a perfect and a disjoint pair pool to a nonzero
  // score driven by the matched half.
  std::vector<std::pair<std::string, std::string>> mixed = {
      {"aa bb cc dd ee", "aa bb cc dd ee"},
      {"ff gg hh ii jj", "kk ll mm nn oo"},
  };
  const double pooled = metrics::corpus_bleu(mixed);
  CHECK(pooled > 0.0);
  CHECK(pooled < 100.0);
}

TEST_CASE("relative degradation reproduces the published attack numbers") {
  metrics::Degradation d = metrics::relative_degradation(35.47, 13.08);
  CHECK(d.value == doctest::Approx(63.12).epsilon(0.0002));
  CHECK_FALSE(d.degenerate);

  metrics::Degradation worse = metrics::relative_degradation(10.0, 12.0);
  CHECK(worse.value == doctest::Approx(-20.0));

  metrics::Degradation zero = metrics::relative_degradation(0.0, 5.0);
  CHECK(zero.degenerate);
  CHECK(zero.value == 0.0);
}

TEST_CASE("success rate is the product of degradation and validity") {
  CHECK(metrics::success_rate(63.12, 100.0) == doctest::Approx(63.12));
  // Published random-baseline row: 44.44% degradation at 30.82% validity.
  CHECK(metrics::success_rate(44.44, 30.82) == doctest::Approx(13.69).epsilon(0.001));
  CHECK(std::fabs(metrics::success_rate(44.44, 30.82) - 13.69) < 0.01);
  CHECK(metrics::valid_rate(3, 4) == doctest::Approx(75.0));
  CHECK(metrics::valid_rate(0, 0) == 0.0);
}
