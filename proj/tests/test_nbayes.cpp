#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "fxsig/nbayes.hpp"
#include "support/oracles.hpp"

using namespace fxsig;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ProcessedDoc doc(std::vector<std::string> tokens) { return {std::move(tokens), std::nullopt}; }

constexpr auto kNeg = ClassLabel::negative;
constexpr auto kNeu = ClassLabel::neutral;
constexpr auto kPos = ClassLabel::positive;

NBModel random_model(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(i));
  NBModel m;
  m.vocabulary = Vocabulary(tokens, 1);
  double z = 0;
  for (auto& p : m.priors) z += (p = 0.05 + u(rng));
  for (auto& p : m.priors) p /= z;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      m.params.mean[c].push_back(u(rng) * 0.5);
      m.params.variance[c].push_back(0.01 + 0.2 * u(rng));
    }
  m.variance_floor = 1e-9;
  return m;
}

}  // namespace

TEST_CASE("vocabulary: frequency cutoff and order", "[nbayes]") {
  const std::vector<ProcessedDoc> ab{doc({"a", "b"}), doc({"a", "c"})};
  const auto v = build_vocabulary(ab, 2);
  CHECK(v.tokens() == std::vector<std::string>{"a"});
  CHECK(v.index_of("a") == 0u);
  CHECK_FALSE(v.index_of("b"));
  const std::vector<ProcessedDoc> single{doc({"a"})};
  CHECK(build_vocabulary(single, 1).size() == 1);
  CHECK_THROWS_AS(build_vocabulary(single, 2), Error);
  const std::vector<ProcessedDoc> unsorted{doc({"zeta", "alpha", "mid", "alpha"})};
  CHECK(build_vocabulary(unsorted, 1).tokens() == std::vector<std::string>{"alpha", "mid", "zeta"});
  CHECK_THROWS_AS(build_vocabulary(std::vector<ProcessedDoc>{}, 1), Error);
}

TEST_CASE("featurize: relative term frequencies", "[nbayes]") {
  const Vocabulary ab({"a", "b"}, 1);
  const auto x = featurize(doc({"a", "a", "b"}), ab);
  CHECK_THAT(x[0], WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(x[1], WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(featurize(doc({}), ab) == FeatureVector{0.0, 0.0});
  CHECK(featurize(doc({"z"}), Vocabulary({"a"}, 1)) == FeatureVector{0.0});
  const auto partial = featurize(doc({"a", "z", "z", "z"}), ab);
  CHECK(partial == FeatureVector{0.25, 0.0});
}

TEST_CASE("train: uniform priors from balanced classes", "[nbayes]") {
  const std::vector<LabeledDoc> data{{doc({"up", "up"}), kPos},   {doc({"up", "x"}), kPos},
                                     {doc({"down", "x"}), kNeg},  {doc({"down", "down"}), kNeg},
                                     {doc({"x", "flat"}), kNeu},  {doc({"flat", "flat"}), kNeu}};
  const auto m = train(data);
  for (double p : m.priors) CHECK_THAT(p, WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(m.vocabulary.tokens() == std::vector<std::string>{"down", "flat", "up", "x"});
}

TEST_CASE("train: constant feature gets the variance floor", "[nbayes]") {
  const Vocabulary v({"a", "b"}, 1);
  const std::vector<FeatureVector> xs{{0.5, 0.0}, {0.5, 1.0}, {0.0, 0.2}, {1.0, 0.4}, {0.2, 0.2}, {0.3, 0.3}};
  const std::vector<ClassLabel> ys{kPos, kPos, kNeg, kNeg, kNeu, kNeu};
  const auto m = train_features(v, xs, ys);
  CHECK(m.params.mean[index_of(kPos)][0] == 0.5);
  CHECK(m.params.variance[index_of(kPos)][0] == m.variance_floor);
  CHECK(m.variance_floor > 0.0);
}

TEST_CASE("train: statistics match a hand computation", "[nbayes]") {
  // Four documents over vocabulary {a, b}; class statistics worked by hand:
  //   pos: x = (0.5, 0.5), (1, 0)  -> mean (0.75, 0.25), var (0.0625, 0.0625)
  //   neg: x = (0, 1)               -> mean (0, 1), var floored
  //   neu: x = (0.25, 0.75)         -> mean (0.25, 0.75), var floored
  // Pooled means (0.4375, 0.5625); pooled variances 0.546875 / 4 = 0.13671875 for both.
  const std::vector<LabeledDoc> data{{doc({"a", "b"}), kPos},
                                     {doc({"a", "a"}), kPos},
                                     {doc({"b", "b"}), kNeg},
                                     {doc({"a", "b", "b", "b"}), kNeu}};
  NBConfig cfg;
  cfg.min_count = 1;
  cfg.variance_floor_scale = 1e-3;
  const auto m = train(data, cfg);
  const auto P = index_of(kPos), N = index_of(kNeg), U = index_of(kNeu);
  CHECK(m.priors[P] == 0.5);
  CHECK(m.priors[N] == 0.25);
  CHECK(m.priors[U] == 0.25);
  CHECK(m.params.mean[P] == std::vector<double>{0.75, 0.25});
  CHECK(m.params.variance[P] == std::vector<double>{0.0625, 0.0625});
  CHECK(m.params.mean[N] == std::vector<double>{0.0, 1.0});
  CHECK(m.params.mean[U] == std::vector<double>{0.25, 0.75});
  CHECK_THAT(m.variance_floor, WithinRel(1e-3 * 0.13671875, 1e-12));
  CHECK(m.params.variance[N][0] == m.variance_floor);
  CHECK(m.params.variance[U][1] == m.variance_floor);
}

TEST_CASE("train: missing class is named", "[nbayes]") {
  const std::vector<LabeledDoc> data{{doc({"a", "a"}), kPos}, {doc({"a", "b"}), kNeg}};
  CHECK_THROWS_WITH(train(data), ContainsSubstring("neutral"));
}

TEST_CASE("train: all-zero variance falls back to a unit-scaled floor", "[nbayes]") {
  const Vocabulary v({"a"}, 1);
  const std::vector<FeatureVector> xs{{0.5}, {0.5}, {0.5}};
  const std::vector<ClassLabel> ys{kPos, kNeg, kNeu};
  const auto m = train_features(v, xs, ys);
  CHECK(m.variance_floor == 1e-9);
}

TEST_CASE("posterior: identical classes give a uniform posterior", "[nbayes]") {
  NBModel m;
  m.vocabulary = Vocabulary({"a", "b"}, 1);
  m.priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (std::size_t c = 0; c < 3; ++c) {
    m.params.mean[c] = {0.2, 0.4};
    m.params.variance[c] = {0.1, 0.3};
  }
  const auto p = posterior(m, FeatureVector{0.9, 0.0});
  for (double v : p) CHECK_THAT(v, WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(classify(m, FeatureVector{0.9, 0.0}) == std::nullopt);
  m.config.rejection_threshold = 0.3;
  CHECK(classify(m, FeatureVector{0.9, 0.0}) == kNeu);
}

TEST_CASE("posterior: single-feature density enters the posterior", "[nbayes]") {
  // One feature, var 0.25 in every class; x = 0.5 sits on the positive mean.
  NBModel m;
  m.vocabulary = Vocabulary({"a"}, 1);
  m.priors = {0.25, 0.25, 0.5};
  m.params.mean = {std::vector<double>{0.0}, std::vector<double>{0.25}, std::vector<double>{0.5}};
  m.params.variance = {std::vector<double>{0.25}, std::vector<double>{0.25}, std::vector<double>{0.25}};
  const double dpos = oracle::gaussian_pdf(0.5, 0.5, 0.25);
  CHECK_THAT(dpos, WithinAbs(0.7979, 5e-5));
  const double jneg = 0.25 * oracle::gaussian_pdf(0.5, 0.0, 0.25);
  const double jneu = 0.25 * oracle::gaussian_pdf(0.5, 0.25, 0.25);
  const double jpos = 0.5 * dpos;
  const auto p = posterior(m, FeatureVector{0.5});
  const double z = jneg + jneu + jpos;
  CHECK_THAT(p[0], WithinAbs(jneg / z, 1e-14));
  CHECK_THAT(p[1], WithinAbs(jneu / z, 1e-14));
  CHECK_THAT(p[2], WithinAbs(jpos / z, 1e-14));
}

TEST_CASE("posterior: matches the direct product on random small models", "[nbayes][property]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = random_model(rng, 1 + trial % 5);
    FeatureVector x(m.vocabulary.size());
    for (double& v : x) v = u(rng);
    const auto got = posterior(m, x);
    const auto want = oracle::direct_posterior(m, x);
    for (std::size_t c = 0; c < 3; ++c) REQUIRE_THAT(got[c], WithinAbs(want[c], 1e-9));
    REQUIRE_THAT(got[0] + got[1] + got[2], WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("posterior: finite when every density underflows", "[nbayes]") {
  std::mt19937_64 rng(5);
  auto m = random_model(rng, 3);
  for (auto& v : m.params.variance)
    for (double& s : v) s = 1e-12;
  const auto p = posterior(m, FeatureVector{1.0, 1.0, 1.0});
  for (double v : p) CHECK(std::isfinite(v));
  CHECK_THAT(p[0] + p[1] + p[2], WithinAbs(1.0, 1e-12));
}

TEST_CASE("posterior: dimension mismatch is an error", "[nbayes]") {
  std::mt19937_64 rng(1);
  const auto m = random_model(rng, 3);
  CHECK_THROWS_AS(posterior(m, FeatureVector{0.1, 0.2}), Error);
}

TEST_CASE("decide: argmax, rejection and tie order", "[nbayes]") {
  CHECK(decide({0.2, 0.2, 0.6}, 0.5) == kPos);
  CHECK(decide({0.4, 0.3, 0.3}, 0.5) == std::nullopt);
  CHECK(decide({0.5, 0.0, 0.5}, 0.4) == kNeg);
  CHECK(decide({0.45, 0.45, 0.1}, 0.4) == kNeu);
  CHECK(decide({0.1, 0.45, 0.45}, 0.4) == kNeu);
  CHECK(decide({0.0, 0.5, 0.5}, 0.5) == std::nullopt);
}

TEST_CASE("classify: mirror-symmetric model sends a central input to neutral", "[nbayes]") {
  NBModel m;
  m.vocabulary = Vocabulary({"a"}, 1);
  m.priors = {0.25, 0.5, 0.25};
  m.params.mean = {std::vector<double>{0.0}, std::vector<double>{0.5}, std::vector<double>{1.0}};
  m.params.variance = {std::vector<double>{0.1}, std::vector<double>{0.1}, std::vector<double>{0.1}};
  CHECK(classify(m, FeatureVector{0.5}) == kNeu);
  const auto s = nb_sentiment_score(m, FeatureVector{0.5});
  CHECK_THAT(s.value(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("nb sentiment score is P(pos) - P(neg)", "[nbayes]") {
  CHECK_THAT(nb_sentiment_score({0.1, 0.2, 0.7}).value(), WithinAbs(0.6, 1e-15));
  CHECK_THAT(nb_sentiment_score({0.7, 0.2, 0.1}).value(), WithinAbs(-0.6, 1e-15));
  CHECK(nb_sentiment_score({0.3, 0.4, 0.3}).value() == 0.0);
  CHECK(nb_sentiment_score({0.0, 0.0, 1.0}).value() < 1.0);
  CHECK(nb_sentiment_score({0.1, 0.2, 0.7}).engine() == Engine::nbayes);
}

TEST_CASE("argmax invariances", "[nbayes][property]") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_model(rng, 4);
    FeatureVector x(4);
    for (double& v : x) v = u(rng);
    const auto base = decide(posterior(m, x), 0.0);

    // A common factor on every unnormalized score is a constant log shift.
    auto logs = log_joint(m, x);
    const double shift = std::log(0.001 + 10.0 * u(rng));
    for (double& l : logs) l += shift;
    REQUIRE(decide(normalize_log_scores(logs), 0.0) == base);

    // A feature with the same Gaussian in every class changes nothing.
    auto wide = m;
    std::vector<std::string> toks = m.vocabulary.tokens();
    toks.push_back("zz");
    wide.vocabulary = Vocabulary(toks, 1);
    const double mu = u(rng), var = 0.05 + u(rng);
    for (std::size_t c = 0; c < 3; ++c) {
      wide.params.mean[c].push_back(mu);
      wide.params.variance[c].push_back(var);
    }
    auto wx = x;
    wx.push_back(u(rng));
    REQUIRE(decide(posterior(wide, wx), 0.0) == base);
  }
}

TEST_CASE("model file: save/load round trip is exact", "[nbayes]") {
  const std::vector<LabeledDoc> data{{doc({"rally", "gain", "gain"}), kPos},   {doc({"gain", "x"}), kPos},
                                     {doc({"loss", "fear"}), kNeg},           {doc({"loss", "x", "fear"}), kNeg},
                                     {doc({"meeting", "x"}), kNeu},           {doc({"meeting", "rally"}), kNeu}};
  NBConfig cfg;
  cfg.min_count = 1;
  const auto m = train(data, cfg);
  std::stringstream s1;
  save_model(s1, m);
  const auto back = load_model(s1);
  std::stringstream s2;
  save_model(s2, back);
  CHECK(s1.str() == s2.str());
  CHECK(back.priors == m.priors);
  CHECK(back.params.mean == m.params.mean);
  CHECK(back.params.variance == m.params.variance);
  CHECK(back.vocabulary.tokens() == m.vocabulary.tokens());
  const auto x = featurize(doc({"gain", "loss", "rally"}), m.vocabulary);
  CHECK(posterior(back, x) == posterior(m, x));

  // Training twice gives bit-identical files.
  std::stringstream s3;
  save_model(s3, train(data, cfg));
  std::stringstream s4;
  save_model(s4, m);
  CHECK(s3.str() == s4.str());
}

TEST_CASE("model file: corrupt inputs are rejected", "[nbayes]") {
  std::istringstream empty("");
  CHECK_THROWS_AS(load_model(empty), Error);
  std::istringstream wrong_magic("fxsig-nb-model v0\n");
  CHECK_THROWS_AS(load_model(wrong_magic), Error);
  const std::string head =
      "fxsig-nb-model v1\nmin_count 1\nvariance_floor_scale 1e-09\nrejection_threshold 0.5\n"
      "variance_floor 1e-09\nprior negative 0.25\nprior neutral 0.25\nprior positive 0.5\nfeatures 1\n";
  std::istringstream ok(head + "a\t0\t0\t0\t1\t1\t1\n");
  CHECK(load_model(ok).vocabulary.size() == 1);
  std::istringstream truncated(head);
  CHECK_THROWS_AS(load_model(truncated), Error);
  std::istringstream short_row(head + "a\t0\t0\t0\t1\t1\n");
  CHECK_THROWS_AS(load_model(short_row), Error);
  std::istringstream low_var(head + "a\t0\t0\t0\t1e-12\t1\t1\n");
  CHECK_THROWS_AS(load_model(low_var), Error);
  std::string bad_prior = head;
  bad_prior.replace(bad_prior.find("positive 0.5"), 12, "positive 0.6");
  std::istringstream bp(bad_prior + "a\t0\t0\t0\t1\t1\t1\n");
  CHECK_THROWS_WITH(load_model(bp), ContainsSubstring("sum to 1"));
}

TEST_CASE("nb config validation", "[nbayes]") {
  NBConfig c;
  CHECK_NOTHROW(c.validate());
  c.rejection_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.min_count = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.variance_floor_scale = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}
