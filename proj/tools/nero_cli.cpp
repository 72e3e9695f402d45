// nero command-line front end.
//
// Exit status: 0 success, 1 usage error (help printed), 2 runtime error.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nero/error.hpp"
#include "nero/harness.hpp"
#include "nero/model.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nero::Error("cannot open '" + path + "'");
  return in;
}

std::vector<nero::Concept> read_manifest_file(const std::string& path) {
  auto in = open_in(path);
  return nero::read_manifest(in);
}

struct SearchFlags {
  nero::SearchConfig cfg;
  void attach(CLI::App* cmd) {
    cmd->add_option("--top-k", cfg.top_k, "Ranked targets nero explores")->capture_default_str();
    cmd->add_option("--timeout", cfg.max_runtime_seconds, "Wall-clock budget in seconds")->capture_default_str();
    cmd->add_option("--max-nodes", cfg.max_nodes, "Concept budget for best-first search")->capture_default_str();
    cmd->add_option("--lambda", cfg.lambda, "Gain weight of the search heuristic")->capture_default_str();
    cmd->add_option("--beta", cfg.beta, "Length penalty of the search heuristic")->capture_default_str();
  }
};

nero::SolverKind parse_solver(const std::string& s) {
  auto k = nero::solver_from_string(s);
  if (!k) throw UsageError("unknown solver '" + s + "' (expected nero, celoe or nero_dagger)");
  return *k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural class expression learning over ALC knowledge bases"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();

  // kb
  auto* kb_cmd = app.add_subcommand("kb", "Knowledge base utilities");
  kb_cmd->require_subcommand(1);
  kb_cmd->fallthrough();
  std::string kb_path;
  auto* kb_validate = kb_cmd->add_subcommand("validate", "Check a knowledge base and print diagnostics");
  kb_validate->add_option("--kb", kb_path, "Knowledge base (.kb or .nt)")->required();
  std::string out_path;
  std::size_t family_size = 202;
  auto* kb_family = kb_cmd->add_subcommand("family", "Generate a family-tree knowledge base");
  kb_family->add_option("--out", out_path, "Output .kb path")->required();
  kb_family->add_option("--individuals", family_size, "Number of people")->capture_default_str();

  // targets
  auto* targets_cmd = app.add_subcommand("targets", "Target space construction");
  targets_cmd->require_subcommand(1);
  targets_cmd->fallthrough();
  std::size_t d = 100, max_length = 3;
  nero::RefinementConfig refinement;
  auto* targets_build = targets_cmd->add_subcommand("build", "Build a target space and write its manifest");
  targets_build->add_option("--kb", kb_path, "Knowledge base")->required();
  targets_build->add_option("--d", d, "Target count")->capture_default_str();
  targets_build->add_option("--maxlength", max_length, "Maximum length of seed concepts")->capture_default_str();
  targets_build->add_option("--out", out_path, "Manifest path (stdout if omitted)");

  // train
  nero::TrainingConfig tcfg;
  std::string targets_path;
  bool verbose = false;
  auto* train_cmd = app.add_subcommand("train", "Train a scorer and save it");
  train_cmd->add_option("--kb", kb_path, "Knowledge base")->required();
  train_cmd->add_option("--targets", targets_path, "Target manifest (built from --d/--maxlength if omitted)");
  train_cmd->add_option("--d", d, "Target count when building")->capture_default_str();
  train_cmd->add_option("--maxlength", max_length, "Seed length when building")->capture_default_str();
  train_cmd->add_option("--out", out_path, "Model output path")->required();
  train_cmd->add_option("--dim", tcfg.dim, "Embedding width m")->capture_default_str();
  train_cmd->add_option("--k", tcfg.k, "Examples per side")->capture_default_str();
  train_cmd->add_option("--epochs", tcfg.epochs)->capture_default_str();
  train_cmd->add_option("--per-epoch", tcfg.problems_per_epoch, "Problems sampled per epoch")->capture_default_str();
  train_cmd->add_option("--batch", tcfg.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", tcfg.learning_rate)->capture_default_str();
  train_cmd->add_flag("-v,--verbose", verbose, "Print the loss of every epoch");

  // solve
  std::string model_path, problem_path, solver_name = "nero";
  std::vector<std::string> pos, neg;
  std::size_t problem_index = 0;
  SearchFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one learning problem");
  solve_cmd->add_option("--kb", kb_path, "Knowledge base")->required();
  solve_cmd->add_option("--model", model_path, "Trained model (not needed for celoe)");
  auto* pos_opt = solve_cmd->add_option("--pos", pos, "Positive individuals");
  solve_cmd->add_option("--neg", neg, "Negative individuals");
  auto* prob_opt = solve_cmd->add_option("--problem", problem_path, "Problem JSON file");
  solve_cmd->add_option("--index", problem_index, "Which problem in the file")->capture_default_str();
  solve_cmd->add_option("--solver", solver_name, "nero, celoe or nero_dagger")->capture_default_str();
  pos_opt->excludes(prob_opt);
  solve_flags.attach(solve_cmd);

  // benchmark
  nero::BenchmarkSpec bench;
  std::vector<std::string> solver_names;
  std::size_t random_count = 0, random_size = 10;
  SearchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run solvers over many problems and report");
  bench_cmd->add_option("--kb", bench.kb_path, "Knowledge base")->required();
  bench_cmd->add_option("--model", bench.model_path, "Trained model");
  auto* bprob = bench_cmd->add_option("--problems", problem_path, "Problem JSON file");
  auto* brand = bench_cmd->add_option("--random-count", random_count, "Generate this many random problems");
  bench_cmd->add_option("--random-size", random_size, "|E| of each random problem")->capture_default_str();
  bprob->excludes(brand);
  bench_cmd->add_option("--solver", solver_names, "Repeatable; default nero");
  bench_cmd->add_option("--out", bench.output_path, "Report path (.json or .csv)");
  bench_cmd->add_flag("--reload", bench.reload_per_problem, "Load the model separately for every problem");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
  bench_flags.attach(bench_cmd);

  // embed
  std::string concept_text;
  auto* embed_cmd = app.add_subcommand("embed", "Print the embedding of a concept");
  embed_cmd->add_option("--kb", kb_path, "Knowledge base")->required();
  embed_cmd->add_option("--model", model_path, "Trained model")->required();
  embed_cmd->add_option("--concept", concept_text, "Concept in either notation")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front(); sub;
         sub = sub->get_subcommands().empty() ? nullptr : sub->get_subcommands().front())
      failed = sub;
    std::cerr << failed->help();
    return 1;
  }

  auto usage = [&](const std::string& msg, const CLI::App* cmd) {
    std::cerr << "error: " << msg << "\n\n" << cmd->help();
    return 1;
  };

  const CLI::App* current = &app;
  try {
    if (*kb_validate) {
      current = kb_validate;
      const auto kb = nero::load_kb_file(kb_path);
      bool errors = false;
      for (const auto& diag : nero::validate(kb)) {
        errors |= diag.severity == nero::Diagnostic::Severity::Error;
        std::cout << (diag.severity == nero::Diagnostic::Severity::Error ? "error: " : "warning: ") << diag.message << '\n';
      }
      std::cout << kb.num_individuals() << " individuals, " << kb.concepts.size() << " concepts, " << kb.roles.size()
                << " roles, " << kb.tbox.size() << " subsumptions, " << kb.types.size() << " type and "
                << kb.relations.size() << " role assertions\n";
      return errors ? 2 : 0;
    }
    if (*kb_family) {
      current = kb_family;
      const auto kb = nero::make_family_kb(seed, family_size);
      std::ofstream out(out_path);
      if (!out) throw nero::Error("cannot open '" + out_path + "' for writing");
      out << nero::render_kb(kb);
      return 0;
    }
    if (*targets_build) {
      current = targets_build;
      nero::RetrievalEngine engine(nero::load_kb_file(kb_path));
      const nero::Refiner refiner(engine, refinement);
      const auto ts = nero::build_targets(engine, refiner, d, max_length, seed);
      if (out_path.empty()) {
        nero::write_manifest(std::cout, ts.targets);
      } else {
        std::ofstream out(out_path);
        if (!out) throw nero::Error("cannot open '" + out_path + "' for writing");
        nero::write_manifest(out, ts.targets);
        std::cerr << ts.size() << " targets written to " << out_path << '\n';
      }
      return 0;
    }
    if (*train_cmd) {
      current = train_cmd;
      nero::RetrievalEngine engine(nero::load_kb_file(kb_path));
      nero::TargetSpace ts;
      if (!targets_path.empty()) {
        ts = nero::target_space_from(engine, read_manifest_file(targets_path));
      } else {
        const nero::Refiner refiner(engine, refinement);
        ts = nero::build_targets(engine, refiner, d, max_length, seed);
      }
      tcfg.seed = seed;
      nero::TrainingLog log;
      const auto model = nero::train(engine, ts, tcfg, &log);
      if (verbose)
        for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
          std::cout << "epoch " << e + 1 << " loss " << num(log.epoch_loss[e]) << '\n';
      nero::save_model_file(model, out_path);
      if (!log.epoch_loss.empty())
        std::cerr << "trained |T|=" << ts.size() << " m=" << tcfg.dim << "; loss " << num(log.epoch_loss.front())
                  << " -> " << num(log.epoch_loss.back()) << '\n';
      return 0;
    }
    if (*solve_cmd) {
      current = solve_cmd;
      const auto solver = parse_solver(solver_name);
      if (solver != nero::SolverKind::Celoe && model_path.empty())
        return usage("solver '" + solver_name + "' needs --model", solve_cmd);
      if (problem_path.empty() && pos.empty()) return usage("give --pos/--neg or --problem", solve_cmd);
      solve_flags.cfg.validate();
      nero::RetrievalEngine engine(nero::load_kb_file(kb_path));
      nero::LearningProblem lp;
      if (!problem_path.empty()) {
        auto in = open_in(problem_path);
        const auto problems = nero::read_problems_json(in);
        if (problem_index >= problems.size())
          throw nero::ConfigError("problem index " + std::to_string(problem_index) + " out of range");
        lp = nero::LearningProblem::from_names(engine.kb(), problems[problem_index].positives,
                                               problems[problem_index].negatives);
      } else {
        lp = nero::LearningProblem::from_names(engine.kb(), pos, neg);
      }
      const nero::Refiner refiner(engine, refinement);
      nero::SolveResult res;
      if (solver == nero::SolverKind::Celoe) {
        res = nero::celoe_solve(engine, refiner, lp, solve_flags.cfg);
      } else {
        const auto model = nero::bind_to_kb(nero::load_model_file(model_path), engine.kb());
        res = solver == nero::SolverKind::Nero ? nero::nero_solve(model, engine, lp, solve_flags.cfg)
                                               : nero::nero_dagger_solve(model, engine, refiner, lp, solve_flags.cfg);
      }
      std::cout << "best: " << nero::render_concept(res.best) << '\n'
                << "f1: " << num(res.best_f1) << '\n'
                << "explored: " << res.explored << '\n'
                << "runtime_s: " << num(res.seconds) << '\n'
                << "termination: " << nero::to_string(res.reason) << '\n';
      return 0;
    }
    if (*bench_cmd) {
      current = bench_cmd;
      if (!solver_names.empty()) {
        bench.solvers.clear();
        for (const auto& s : solver_names) bench.solvers.push_back(parse_solver(s));
      }
      if (!problem_path.empty()) {
        auto in = open_in(problem_path);
        bench.problems = nero::read_problems_json(in);
      } else if (random_count > 0) {
        bench.random = nero::RandomProblemSpec{random_count, random_size};
      } else {
        return usage("give --problems or --random-count", bench_cmd);
      }
      bench.search = bench_flags.cfg;
      bench.refinement = refinement;
      bench.seed = seed;
      const auto report = nero::run_benchmark(bench);
      if (bench.output_path.empty()) nero::write_report_csv(std::cout, report);
      for (const auto& a : report.aggregates)
        std::cerr << a.solver << ": n=" << a.count << " f1 " << num(a.f1_mean) << " +- " << num(a.f1_std) << ", explored "
                  << num(a.explored_mean) << " +- " << num(a.explored_std) << ", runtime " << num(a.runtime_mean)
                  << " s\n";
      return 0;
    }
    if (*embed_cmd) {
      current = embed_cmd;
      nero::RetrievalEngine engine(nero::load_kb_file(kb_path));
      const auto model = nero::bind_to_kb(nero::load_model_file(model_path), engine.kb());
      const auto v = nero::embed_concept(model, engine, nero::parse_concept(concept_text));
      for (Eigen::Index i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << num(v[i]);
      std::cout << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    return usage(e.what(), current);
  } catch (const nero::ConfigError& e) {
    return usage(e.what(), current);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
