#ifndef NERO_SEARCH_HPP
#define NERO_SEARCH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nero/concept.hpp"
#include "nero/model.hpp"
#include "nero/refinement.hpp"
#include "nero/retrieval.hpp"

namespace nero {

struct SearchConfig {
  double lambda = 0.01;  ///< gain weight
  double beta = 0.05;    ///< length penalty, must exceed lambda
  double max_runtime_seconds = 10.0;
  std::size_t max_nodes = 10000;  ///< explored-concept budget for best-first search
  std::size_t top_k = 100;        ///< ranked targets to explore

  /// Throws ConfigError unless beta > lambda >= 0 and budgets are positive.
  void validate() const;
};

enum class Termination { Goal, Budget, Timeout, Exhausted };

std::string_view to_string(Termination t);
std::optional<Termination> termination_from_string(std::string_view s);

struct TraceEntry {
  Concept concept_expr;
  double f1;
};

/// Outcome of one solve. `trace` holds every explored concept in order, so
/// best_f1 == max over trace and explored == trace.size().
struct SolveResult {
  Concept best = Concept::top();
  double best_f1 = 0.0;
  std::size_t explored = 0;
  double seconds = 0.0;
  Termination reason = Termination::Exhausted;
  std::vector<TraceEntry> trace;
};

/// Q(B) + λ·(Q(B) − Q(A)) − β·|B| for B refined from A.
double celoe_heuristic(double parent_quality, double quality, std::size_t length, const SearchConfig& cfg);

/// Target indices by descending predicted F1, ties by ascending index.
std::vector<std::size_t> rank_targets(const NeroModel& model, const LearningProblem& lp);

/// Explores ranked targets one retrieval at a time; stops on the first goal,
/// after top_k targets, or on timeout.
SolveResult nero_solve(const NeroModel& model, const RetrievalEngine& engine, const LearningProblem& lp,
                       const SearchConfig& cfg);

/// Best-first refinement search. The frontier starts with ⊤ and `seeds`
/// (roots get no gain term) and always expands the node with the highest
/// heuristic; ties prefer higher quality, then shorter, then the smaller
/// rendering. Canonical duplicates are never explored twice.
SolveResult celoe_solve(const RetrievalEngine& engine, const Refiner& refiner, const LearningProblem& lp,
                        const SearchConfig& cfg, std::span<const Concept> seeds = {});

/// nero_solve, then — unless it found a goal — best-first search seeded with
/// the explored targets, sharing one runtime budget. Counts, runtimes and
/// traces are combined; the better best concept wins (ties keep the first).
SolveResult nero_dagger_solve(const NeroModel& model, const RetrievalEngine& engine, const Refiner& refiner,
                              const LearningProblem& lp, const SearchConfig& cfg);

}  // namespace nero

#endif  // NERO_SEARCH_HPP
