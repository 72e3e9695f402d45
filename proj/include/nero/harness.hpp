#ifndef NERO_HARNESS_HPP
#define NERO_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nero/kb.hpp"
#include "nero/refinement.hpp"
#include "nero/retrieval.hpp"
#include "nero/search.hpp"

namespace nero {

/// Family-style knowledge base: the 18-concept kinship TBox, the roles
/// hasChild/hasParent/hasSibling/married, and generated multi-generation
/// family trees with exactly `num_individuals` people (at least 2).
KnowledgeBase make_family_kb(std::uint64_t seed, std::size_t num_individuals = 202);

/// `count` problems of `size` distinct individuals each, split into
/// ceil(size/2) positives and floor(size/2) negatives. Throws ConfigError
/// when size < 2 or size > |I|.
std::vector<LearningProblem> generate_random_problems(const RetrievalEngine& engine, std::size_t count,
                                                      std::size_t size, std::uint64_t seed);

/// Problems whose positives come from R(C) and negatives from Δ \ R(C) for a
/// target C with at least `per_side` individuals on both sides, so C is a goal.
std::vector<LearningProblem> generate_concept_problems(const TargetSpace& targets, std::size_t count,
                                                       std::size_t per_side, std::uint64_t seed);

/// Learning problem by individual names, as stored in problem files.
struct NamedProblem {
  std::string id;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

/// Accepts a single {"positives": [...], "negatives": [...]} object, an array
/// of them, or {"problems": [...]}. Optional "id" members name the problems.
std::vector<NamedProblem> read_problems_json(std::istream& in);
void write_problems_json(std::ostream& out, const std::vector<NamedProblem>& problems);
NamedProblem to_named(const KnowledgeBase& kb, const LearningProblem& lp, std::string id);

enum class SolverKind { Nero, Celoe, NeroDagger };
std::string_view to_string(SolverKind s);
std::optional<SolverKind> solver_from_string(std::string_view s);

struct RandomProblemSpec {
  std::size_t count = 50;
  std::size_t size = 10;
};

struct BenchmarkSpec {
  std::string kb_path;
  std::vector<NamedProblem> problems;      ///< explicit problems, or
  std::optional<RandomProblemSpec> random;  ///< generated ones (used when set)
  std::vector<SolverKind> solvers{SolverKind::Nero};
  SearchConfig search;
  RefinementConfig refinement;
  std::string model_path;
  std::string output_path;  ///< ".json" or ".csv"; empty for none
  std::uint64_t seed = 1;
  bool reload_per_problem = false;  ///< charge model loading to every problem
  std::size_t jobs = 1;
};

struct ReportRow {
  std::string problem;
  std::string solver;
  double f1 = 0.0;
  double runtime_seconds = 0.0;
  std::size_t explored = 0;
  std::string best_concept;
  std::string termination;
  std::string error;  ///< empty on success

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Mean ± population standard deviation over the successful rows of a solver.
struct AggregateRow {
  std::string solver;
  std::size_t count = 0;
  double f1_mean = 0.0;
  double f1_std = 0.0;
  double runtime_mean = 0.0;
  double runtime_std = 0.0;
  double explored_mean = 0.0;
  double explored_std = 0.0;

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

struct BenchmarkReport {
  std::vector<ReportRow> rows;
  std::vector<AggregateRow> aggregates;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// One aggregate per solver, in order of first appearance.
std::vector<AggregateRow> aggregate(const std::vector<ReportRow>& rows);

/// Runs every solver on every problem. Per-problem failures land in the row's
/// `error` column; configuration problems throw. Rows are ordered by problem,
/// then solver, independently of `jobs`.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec);

void write_report_json(std::ostream& out, const BenchmarkReport& report);
BenchmarkReport read_report_json(std::istream& in);
/// Two CSV tables separated by a blank line: per-problem rows, then aggregates.
void write_report_csv(std::ostream& out, const BenchmarkReport& report);
BenchmarkReport read_report_csv(std::istream& in);
void write_report_file(const std::string& path, const BenchmarkReport& report);

}  // namespace nero

#endif  // NERO_HARNESS_HPP
