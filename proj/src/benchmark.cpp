#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <thread>

#include "nero/error.hpp"
#include "nero/harness.hpp"
#include "nero/model.hpp"

namespace nero {

std::string_view to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Nero:
      return "nero";
    case SolverKind::Celoe:
      return "celoe";
    case SolverKind::NeroDagger:
      return "nero_dagger";
  }
  return "nero";
}

std::optional<SolverKind> solver_from_string(std::string_view s) {
  for (auto k : {SolverKind::Nero, SolverKind::Celoe, SolverKind::NeroDagger})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::vector<AggregateRow> aggregate(const std::vector<ReportRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<const ReportRow*>> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AggregateRow& a) { return a.solver == r.solver; });
    if (it == out.end()) {
      out.push_back({r.solver});
      groups.emplace_back();
      it = out.end() - 1;
    }
    if (r.error.empty()) groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
  }
  auto stats = [](const std::vector<const ReportRow*>& g, auto field, double& mean, double& sd) {
    mean = sd = 0.0;
    if (g.empty()) return;
    for (const auto* r : g) mean += field(*r);
    mean /= static_cast<double>(g.size());
    for (const auto* r : g) sd += (field(*r) - mean) * (field(*r) - mean);
    sd = std::sqrt(sd / static_cast<double>(g.size()));
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& a = out[i];
    a.count = groups[i].size();
    stats(groups[i], [](const ReportRow& r) { return r.f1; }, a.f1_mean, a.f1_std);
    stats(groups[i], [](const ReportRow& r) { return r.runtime_seconds; }, a.runtime_mean, a.runtime_std);
    stats(groups[i], [](const ReportRow& r) { return static_cast<double>(r.explored); }, a.explored_mean, a.explored_std);
  }
  return out;
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec) {
  spec.search.validate();
  spec.refinement.validate();
  if (spec.solvers.empty()) throw ConfigError("no solver selected");

  RetrievalEngine engine(load_kb_file(spec.kb_path));
  const auto& kb = engine.kb();

  std::vector<NamedProblem> problems;
  if (spec.random) {
    if (spec.random->count < 1) throw ConfigError("random problem count must be at least 1");
    const auto lps = generate_random_problems(engine, spec.random->count, spec.random->size, spec.seed);
    for (std::size_t i = 0; i < lps.size(); ++i) problems.push_back(to_named(kb, lps[i], "random-" + std::to_string(i)));
  } else {
    problems = spec.problems;
  }
  if (problems.empty()) throw ConfigError("benchmark has no learning problems");

  const bool needs_model = std::any_of(spec.solvers.begin(), spec.solvers.end(), [](SolverKind s) { return s != SolverKind::Celoe; });
  if (needs_model && spec.model_path.empty()) throw ConfigError("selected solver needs a model (--model)");
  std::unique_ptr<const NeroModel> shared;
  if (needs_model && !spec.reload_per_problem)
    shared = std::make_unique<const NeroModel>(bind_to_kb(load_model_file(spec.model_path), kb));

  const Refiner refiner(engine, spec.refinement);
  const std::size_t num_solvers = spec.solvers.size();
  std::vector<ReportRow> rows(problems.size() * num_solvers);

  auto run_one = [&](std::size_t task) {
    const auto& problem = problems[task / num_solvers];
    const auto solver = spec.solvers[task % num_solvers];
    ReportRow& row = rows[task];
    row.problem = problem.id;
    row.solver = std::string(to_string(solver));
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto lp = LearningProblem::from_names(kb, problem.positives, problem.negatives);
      std::unique_ptr<const NeroModel> local;
      const NeroModel* model = shared.get();
      if (solver != SolverKind::Celoe && !model) {
        local = std::make_unique<const NeroModel>(bind_to_kb(load_model_file(spec.model_path), kb));
        model = local.get();
      }
      SolveResult res;
      switch (solver) {
        case SolverKind::Nero:
          res = nero_solve(*model, engine, lp, spec.search);
          break;
        case SolverKind::Celoe:
          res = celoe_solve(engine, refiner, lp, spec.search);
          break;
        case SolverKind::NeroDagger:
          res = nero_dagger_solve(*model, engine, refiner, lp, spec.search);
          break;
      }
      row.f1 = res.best_f1;
      row.explored = res.explored;
      row.best_concept = render_concept(res.best, Notation::Ascii);
      row.termination = std::string(to_string(res.reason));
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(spec.jobs, rows.size()));
  if (jobs == 1) {
    for (std::size_t t = 0; t < rows.size(); ++t) run_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t t = next++; t < rows.size(); t = next++) run_one(t);
      });
    for (auto& w : workers) w.join();
  }

  BenchmarkReport report{std::move(rows), {}};
  report.aggregates = aggregate(report.rows);
  if (!spec.output_path.empty()) write_report_file(spec.output_path, report);
  return report;
}

}  // namespace nero
