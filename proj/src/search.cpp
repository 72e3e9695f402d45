#include "nero/search.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>
#include <unordered_set>

#include "nero/error.hpp"

namespace nero {

void SearchConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(beta > lambda)) throw ConfigError("beta must be greater than lambda");
  if (!(max_runtime_seconds > 0.0)) throw ConfigError("max_runtime_seconds must be positive");
  if (max_nodes < 1) throw ConfigError("max_nodes must be at least 1");
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Goal:
      return "goal";
    case Termination::Budget:
      return "budget";
    case Termination::Timeout:
      return "timeout";
    case Termination::Exhausted:
      return "exhausted";
  }
  return "exhausted";
}

std::optional<Termination> termination_from_string(std::string_view s) {
  for (auto t : {Termination::Goal, Termination::Budget, Termination::Timeout, Termination::Exhausted})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

double celoe_heuristic(double parent_quality, double quality, std::size_t length, const SearchConfig& cfg) {
  return quality + cfg.lambda * (quality - parent_quality) - cfg.beta * static_cast<double>(length);
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(double budget_seconds, Clock::time_point start = Clock::now())
      : start_(start), budget_(budget_seconds) {}
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool expired() const { return elapsed() >= budget_; }

 private:
  Clock::time_point start_;
  double budget_;
};

void record(SolveResult& res, const Concept& c, double f1) {
  if (res.trace.empty() || f1 > res.best_f1) {
    res.best = c;
    res.best_f1 = f1;
  }
  res.trace.push_back({c, f1});
  ++res.explored;
}

}  // namespace

std::vector<std::size_t> rank_targets(const NeroModel& model, const LearningProblem& lp) {
  const Vector scores = forward(model, lp.positives, lp.negatives);
  std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
  });
  return order;
}

namespace {

SolveResult nero_solve_impl(const NeroModel& model, const RetrievalEngine& engine, const LearningProblem& lp,
                            const SearchConfig& cfg, const Stopwatch& clock) {
  SolveResult res;
  const auto order = rank_targets(model, lp);
  res.reason = Termination::Exhausted;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == cfg.top_k) {
      res.reason = Termination::Budget;
      break;
    }
    if (clock.expired()) {
      res.reason = Termination::Timeout;
      break;
    }
    const Concept& c = model.targets[order[i]];
    const IndividualSet r = engine.retrieve(c);
    record(res, c, f1_score(r, lp));
    if (covers_exactly(r, lp)) {
      res.reason = Termination::Goal;
      break;
    }
  }
  res.seconds = clock.elapsed();
  return res;
}

struct SearchNode {
  Concept concept_expr;
  double quality;
  double heuristic;
  std::size_t length;
  std::ptrdiff_t parent;
  std::size_t expansions = 0;
};

SolveResult celoe_solve_impl(const RetrievalEngine& engine, const Refiner& refiner, const LearningProblem& lp,
                             const SearchConfig& cfg, std::span<const Concept> seeds, const Stopwatch& clock) {
  SolveResult res;
  std::vector<SearchNode> nodes;
  std::unordered_set<Concept> seen;

  // True when `a` should be expanded after `b`.
  auto lower_priority = [&nodes](std::size_t a, std::size_t b) {
    const auto& x = nodes[a];
    const auto& y = nodes[b];
    if (x.heuristic != y.heuristic) return x.heuristic < y.heuristic;
    if (x.quality != y.quality) return x.quality < y.quality;
    if (x.length != y.length) return x.length > y.length;
    return y.concept_expr.key() < x.concept_expr.key();
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(lower_priority)> frontier(lower_priority);

  // Returns a termination reason when the search must stop.
  auto explore = [&](const Concept& c, std::ptrdiff_t parent) -> std::optional<Termination> {
    if (res.explored >= cfg.max_nodes) return Termination::Budget;
    if (clock.expired()) return Termination::Timeout;
    const IndividualSet r = engine.retrieve(c);
    const double q = f1_score(r, lp);
    record(res, c, q);
    const double parent_q = parent < 0 ? q : nodes[static_cast<std::size_t>(parent)].quality;
    nodes.push_back({c, q, celoe_heuristic(parent_q, q, c.length(), cfg), c.length(), parent});
    frontier.push(nodes.size() - 1);
    if (covers_exactly(r, lp)) return Termination::Goal;
    return std::nullopt;
  };

  auto finish = [&](Termination t) {
    res.reason = t;
    res.seconds = clock.elapsed();
    return res;
  };

  std::vector<Concept> roots{Concept::top()};
  roots.insert(roots.end(), seeds.begin(), seeds.end());
  for (const auto& c : roots) {
    if (!seen.insert(c).second) continue;
    if (auto stop = explore(c, -1)) return finish(*stop);
  }

  while (!frontier.empty()) {
    const std::size_t idx = frontier.top();
    frontier.pop();
    ++nodes[idx].expansions;
    const Concept parent = nodes[idx].concept_expr;
    for (const auto& child : refiner.refine(parent)) {
      if (!seen.insert(child).second) continue;
      if (auto stop = explore(child, static_cast<std::ptrdiff_t>(idx))) return finish(*stop);
    }
  }
  return finish(Termination::Exhausted);
}

}  // namespace

SolveResult nero_solve(const NeroModel& model, const RetrievalEngine& engine, const LearningProblem& lp,
                       const SearchConfig& cfg) {
  cfg.validate();
  return nero_solve_impl(model, engine, lp, cfg, Stopwatch(cfg.max_runtime_seconds));
}

SolveResult celoe_solve(const RetrievalEngine& engine, const Refiner& refiner, const LearningProblem& lp,
                        const SearchConfig& cfg, std::span<const Concept> seeds) {
  cfg.validate();
  return celoe_solve_impl(engine, refiner, lp, cfg, seeds, Stopwatch(cfg.max_runtime_seconds));
}

SolveResult nero_dagger_solve(const NeroModel& model, const RetrievalEngine& engine, const Refiner& refiner,
                              const LearningProblem& lp, const SearchConfig& cfg) {
  cfg.validate();
  const Stopwatch clock(cfg.max_runtime_seconds);
  SolveResult first = nero_solve_impl(model, engine, lp, cfg, clock);
  if (first.reason == Termination::Goal) return first;

  std::vector<Concept> seeds;
  seeds.reserve(first.trace.size());
  for (const auto& e : first.trace) seeds.push_back(e.concept_expr);
  SolveResult second = celoe_solve_impl(engine, refiner, lp, cfg, seeds, clock);

  SolveResult out;
  const bool second_better = !second.trace.empty() && second.best_f1 > first.best_f1;
  out.best = second_better ? second.best : first.best;
  out.best_f1 = second_better ? second.best_f1 : first.best_f1;
  out.explored = first.explored + second.explored;
  out.reason = second.reason;
  out.trace = std::move(first.trace);
  out.trace.insert(out.trace.end(), std::make_move_iterator(second.trace.begin()),
                   std::make_move_iterator(second.trace.end()));
  out.seconds = clock.elapsed();
  return out;
}

}  // namespace nero
