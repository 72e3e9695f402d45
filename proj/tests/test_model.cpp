#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nero/error.hpp"
#include "nero/harness.hpp"
#include "nero/model.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace nero;
using nero::testing::kb_from;
using nero::testing::WarningCapture;

namespace {

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("i" + std::to_string(i));
  return out;
}

std::vector<Concept> atoms(std::size_t n) {
  std::vector<Concept> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Concept::atomic("c" + std::to_string(i)));
  return out;
}

NeroModel random_model(std::size_t n, std::size_t m, std::size_t t, std::uint64_t seed) {
  auto model = init_model(names(n), atoms(t), m, seed);
  // Spread weights past the init range so outputs leave the linear regime.
  model.psi *= 10.0;
  model.W *= 10.0;
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Eigen::Index i = 0; i < model.b.size(); ++i) model.b[i] = u(rng);
  return model;
}

// Straight-line evaluation of σ(φ(Σψ(E+)) − φ(Σψ(E−))) with explicit loops.
std::vector<double> oracle_forward(const NeroModel& model, const std::vector<IndividualId>& pos,
                                   const std::vector<IndividualId>& neg) {
  const auto m = model.dim();
  std::vector<double> sp(m, 0.0), sn(m, 0.0);
  for (auto x : pos)
    for (std::size_t j = 0; j < m; ++j) sp[j] += model.psi(x, j);
  for (auto x : neg)
    for (std::size_t j = 0; j < m; ++j) sn[j] += model.psi(x, j);
  std::vector<double> out;
  for (std::size_t t = 0; t < model.num_targets(); ++t) {
    double fp = model.b[t], fn = model.b[t];
    for (std::size_t j = 0; j < m; ++j) {
      fp += model.W(t, j) * sp[j];
      fn += model.W(t, j) * sn[j];
    }
    out.push_back(1.0 / (1.0 + std::exp(-(fp - fn))));
  }
  return out;
}

TrainingPoint random_point(std::mt19937_64& rng, std::size_t n, std::size_t t) {
  std::vector<IndividualId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<IndividualId>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  TrainingPoint p;
  p.positives = {ids[0], ids[1]};
  p.negatives = {ids[2]};
  std::sort(p.positives.begin(), p.positives.end());
  std::uniform_real_distribution<double> u(0, 1);
  p.y = Vector(static_cast<Eigen::Index>(t));
  for (std::size_t j = 0; j < t; ++j) p.y[static_cast<Eigen::Index>(j)] = u(rng);
  return p;
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}); }

}  // namespace

TEST_CASE("init_model") {
  const auto model = init_model(names(6), atoms(4), 5, 3);
  CHECK(model.num_individuals() == 6);
  CHECK(model.num_targets() == 4);
  CHECK(model.dim() == 5);
  CHECK(model.psi.cwiseAbs().maxCoeff() <= 0.1);
  CHECK(model.W.cwiseAbs().maxCoeff() <= 0.1);
  CHECK(model.b.isZero());
  const auto again = init_model(names(6), atoms(4), 5, 3);
  CHECK(model.psi == again.psi);
  CHECK(model.W == again.W);
  CHECK(model.individual_index("i4") == 4);
  CHECK_THROWS_AS(model.individual_index("zz"), UnknownNameError);
}

TEST_CASE("forward: equal sides give exactly one half") {
  const auto model = random_model(6, 4, 5, 1);
  const std::vector<IndividualId> s{1, 3, 4};
  const auto y = forward(model, s, s);
  for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(y[i] == 0.5);
}

TEST_CASE("forward matches the straight-line evaluation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto model = random_model(7, 4, 6, seed);
    const std::vector<IndividualId> pos{0}, neg{1};
    const auto y = forward(model, pos, neg);
    const auto expect = oracle_forward(model, pos, neg);
    for (std::size_t t = 0; t < expect.size(); ++t) CHECK(y[static_cast<Eigen::Index>(t)] == doctest::Approx(expect[t]).epsilon(1e-12));
    const std::vector<IndividualId> p2{0, 2, 5}, n2{1, 6};
    const auto y2 = forward(model, p2, n2);
    const auto e2 = oracle_forward(model, p2, n2);
    for (std::size_t t = 0; t < e2.size(); ++t) CHECK(y2[static_cast<Eigen::Index>(t)] == doctest::Approx(e2[t]).epsilon(1e-12));
  }
}

TEST_CASE("forward: bias invariance and antisymmetry") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto model = random_model(8, 3, 4, seed);
    const std::vector<IndividualId> pos{0, 2}, neg{5, 7, 1};
    const auto y = forward(model, pos, neg);
    model.b.array() += 3.25;
    CHECK(forward(model, pos, neg) == y);
    model.b = Vector::Random(model.b.size());
    CHECK(forward(model, pos, neg) == y);
    const auto flipped = forward(model, neg, pos);
    for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(flipped[i] == doctest::Approx(1.0 - y[i]).epsilon(1e-15));
  }
}

TEST_CASE("forward is permutation invariant bit for bit") {
  std::mt19937_64 rng(5);
  const auto model = random_model(12, 5, 6, 9);
  std::vector<IndividualId> pos{3, 7, 1, 10}, neg{0, 11, 5};
  const auto y = forward(model, pos, neg);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    CHECK(forward(model, pos, neg) == y);
  }
}

TEST_CASE("forward input validation") {
  const auto model = random_model(4, 2, 3, 1);
  const std::vector<IndividualId> ok{0}, bad{4};
  CHECK_THROWS_AS(forward(model, ok, bad), Error);
  CHECK_THROWS_AS(forward(model, IndividualSet(5), IndividualSet(5)), Error);
}

TEST_CASE("gradients vanish when labels equal predictions") {
  const auto model = random_model(6, 3, 4, 2);
  std::mt19937_64 rng(1);
  auto p = random_point(rng, 6, 4);
  p.y = forward(model, p.positives, p.negatives);
  const std::vector<TrainingPoint> batch{p};
  const auto lg = loss_and_gradients(model, batch);
  CHECK(lg.grads.W.isZero(0.0));
  CHECK(lg.grads.psi.isZero(0.0));
  CHECK(lg.grads.b.isZero(0.0));
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(6);
  const double h = 1e-5;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto model = random_model(5, 3, 4, seed);
    model.psi /= 5.0;
    model.W /= 5.0;
    std::vector<TrainingPoint> batch;
    for (int i = 0; i < 3; ++i) batch.push_back(random_point(rng, 5, 4));
    const auto lg = loss_and_gradients(model, batch);
    CHECK(lg.loss == doctest::Approx(batch_loss(model, batch)).epsilon(1e-15));
    CHECK(lg.grads.b.isZero(0.0));

    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = batch_loss(model, batch);
      param = keep - h;
      const double down = batch_loss(model, batch);
      param = keep;
      worst = std::max(worst, rel_err(analytic, (up - down) / (2 * h)));
    };
    for (Eigen::Index i = 0; i < model.psi.rows(); ++i)
      for (Eigen::Index j = 0; j < model.psi.cols(); ++j) probe(model.psi(i, j), lg.grads.psi(i, j));
    for (Eigen::Index i = 0; i < model.W.rows(); ++i)
      for (Eigen::Index j = 0; j < model.W.cols(); ++j) probe(model.W(i, j), lg.grads.W(i, j));
    for (Eigen::Index i = 0; i < model.b.size(); ++i) probe(model.b[i], lg.grads.b[i]);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("non-finite loss raises") {
  auto model = random_model(5, 3, 4, 1);
  std::mt19937_64 rng(1);
  std::vector<TrainingPoint> batch{random_point(rng, 5, 4)};
  batch[0].y[0] = std::nan("");
  CHECK_THROWS_AS(loss_and_gradients(model, batch), DivergenceError);
}

TEST_CASE("training points") {
  RetrievalEngine e(kb_from(nero::testing::kToyKb));
  const auto ts = target_space_from(e, {parse_concept("Male")});
  const auto targets = target_space_from(e, {parse_concept("Male"), parse_concept("Female"), parse_concept("Top")});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto p = sample_training_point(e, ts, 1, rng);
    REQUIRE(p.positives.size() == 1);
    REQUIRE(p.negatives.size() == 1);
    const auto a = e.kb().individual_index("a"), c = e.kb().individual_index("c");
    CHECK((p.positives[0] == a || p.positives[0] == c));
    CHECK(p.positives[0] != p.negatives[0]);
    const auto lp = LearningProblem::from_ids(3, p.positives, p.negatives);
    CHECK(p.y[0] == f1(e, parse_concept("Male"), lp));
  }
  std::mt19937_64 r1(9), r2(9);
  const auto p1 = sample_training_point(e, targets, 1, r1);
  const auto p2 = sample_training_point(e, targets, 1, r2);
  CHECK(p1.positives == p2.positives);
  CHECK(p1.negatives == p2.negatives);
  CHECK(p1.y == p2.y);
  CHECK_THROWS_AS(sample_training_point(e, targets, 2, r1), ConfigError);
}

TEST_CASE("training") {
  RetrievalEngine e(kb_from(nero::testing::kToyKb));
  WarningCapture quiet;
  const auto ts = build_targets(e, Refiner(e), 8, 3, 1);
  TrainingConfig cfg;
  cfg.k = 1;
  cfg.dim = 16;

  SUBCASE("zero epochs returns the initial model") {
    cfg.epochs = 0;
    const auto model = train(e, ts, cfg);
    const auto init = init_model(e.kb().individuals.names(), ts.targets, cfg.dim, cfg.seed);
    CHECK(model.psi == init.psi);
    CHECK(model.W == init.W);
    CHECK(model.b == init.b);
  }
  SUBCASE("loss halves over 200 epochs") {
    TrainingLog log;
    train(e, ts, cfg, &log);
    REQUIRE(log.epoch_loss.size() == 200);
    CHECK(log.epoch_loss.back() <= 0.5 * log.epoch_loss.front());
  }
  SUBCASE("deterministic") {
    cfg.epochs = 30;
    const auto a = train(e, ts, cfg);
    const auto b = train(e, ts, cfg);
    CHECK(a.psi == b.psi);
    CHECK(a.W == b.W);
    CHECK(a.b == b.b);
    cfg.seed = 2;
    CHECK(train(e, ts, cfg).psi != a.psi);
  }
  SUBCASE("config validation") {
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(e, ts, cfg), ConfigError);
  }
}

TEST_CASE("concept embeddings") {
  RetrievalEngine e(kb_from(nero::testing::kToyKb));
  const auto ts = build_targets(e, Refiner(e), 5, 3, 1);
  auto model = init_model(e.kb().individuals.names(), ts.targets, 4, 2);
  model.b = Vector::LinSpaced(model.b.size(), -1.0, 1.0);
  {
    WarningCapture warnings;
    CHECK(embed_concept(model, e, Concept::bottom()) == model.b);
    CHECK(warnings.messages.size() == 1);
  }
  const auto a = e.kb().individual_index("a");
  const Vector expect = model.W * model.psi.row(a).transpose() + model.b;
  CHECK(embed_concept(model, e, parse_concept("Male ⊓ ∃ hasSibling.Female")) == expect);
  CHECK(embed_concept(model, e, parse_concept("Brother")) ==
        embed_concept(model, e, parse_concept("Male ⊓ ∃ hasSibling.Female")));
}

TEST_CASE("model persistence") {
  RetrievalEngine e(kb_from(nero::testing::kToyKb));
  const auto ts = build_targets(e, Refiner(e), 5, 3, 1);
  auto model = init_model(e.kb().individuals.names(), ts.targets, 4, 2);
  model.b = Vector::LinSpaced(model.b.size(), -1.0, 1.0);
  std::stringstream buf;
  save_model(model, buf);
  const std::string bytes = buf.str();

  std::istringstream in(bytes);
  const auto back = load_model(in);
  CHECK(back.psi == model.psi);
  CHECK(back.W == model.W);
  CHECK(back.b == model.b);
  CHECK(back.targets == model.targets);
  CHECK(back.individual_names == model.individual_names);
  const std::vector<IndividualId> pos{0}, neg{1, 2};
  CHECK(forward(back, pos, neg) == forward(model, pos, neg));

  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream truncated(bytes.substr(0, cut));
    CHECK_THROWS_AS(load_model(truncated), FormatError);
  }
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream bm(bad_magic);
  CHECK_THROWS_AS(load_model(bm), FormatError);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::istringstream bv(bad_version);
  CHECK_THROWS_AS(load_model(bv), FormatError);
}

TEST_CASE("binding a model to a knowledge base") {
  RetrievalEngine e(kb_from(nero::testing::kToyKb));
  const auto ts = build_targets(e, Refiner(e), 5, 3, 1);
  const auto model = init_model(e.kb().individuals.names(), ts.targets, 4, 2);

  // same individuals, different order
  const auto reordered = kb_from("individual c\nindividual b\n" + std::string(nero::testing::kToyKb));
  const auto bound = bind_to_kb(model, reordered);
  const std::vector<std::string> p{"a"}, n{"b"};
  const auto lp_old = LearningProblem::from_names(e.kb(), p, n);
  const auto lp_new = LearningProblem::from_names(reordered, p, n);
  CHECK(forward(bound, lp_new.positives, lp_new.negatives) == forward(model, lp_old.positives, lp_old.negatives));

  const auto missing = kb_from("sub Brother Male\nsub Male Person\nsub Female Person\ntype a Brother\ntype b Female\nrel a hasSibling b\n");
  try {
    bind_to_kb(model, missing);
    FAIL("expected UnknownNameError");
  } catch (const UnknownNameError& err) {
    CHECK(err.name() == "c");
  }
  const auto extra = kb_from(std::string(nero::testing::kToyKb) + "type d Male\n");
  CHECK_THROWS_AS(bind_to_kb(model, extra), Error);
}
