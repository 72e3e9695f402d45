#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
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
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nero-harness-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Family KB, targets and a trained model written to disk once per process.
struct Fixture {
  TempDir dir;
  std::string kb_path = dir.file("family.kb");
  std::string model_path = dir.file("family.nero");
  Fixture() {
    const auto kb = make_family_kb(2);
    std::ofstream(kb_path) << render_kb(kb);
    RetrievalEngine engine(kb);
    const auto ts = build_targets(engine, Refiner(engine), 100, 3, 1);
    TrainingConfig cfg;
    cfg.epochs = 40;
    save_model_file(train(engine, ts, cfg), model_path);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void strip_clock(BenchmarkReport& r) {
  for (auto& row : r.rows) row.runtime_seconds = 0.0;
  for (auto& a : r.aggregates) a.runtime_mean = a.runtime_std = 0.0;
}

BenchmarkReport sample_report() {
  BenchmarkReport r;
  r.rows = {
      {"p0", "nero", 0.8, 0.0012345678901234567, 100, "Mother or Sister", "budget", ""},
      {"p,1", "nero", 1.0, 1e-300, 3, "exists hasChild.(Male and not Father)", "goal", ""},
      {"p\"2\"", "celoe", 2.0 / 3.0, 12.5, 10000, "Top", "timeout", ""},
      {"p3", "celoe", 0.0, 0.1, 0, "", "", "unknown individual 'x', \"quoted\"\nsecond line"},
  };
  r.aggregates = aggregate(r.rows);
  return r;
}

}  // namespace

TEST_CASE("random problems") {
  RetrievalEngine e(make_family_kb(1));
  const auto ps = generate_random_problems(e, 20, 10, 3);
  REQUIRE(ps.size() == 20);
  for (const auto& lp : ps) {
    CHECK(lp.positives.count() == 5);
    CHECK(lp.negatives.count() == 5);
    CHECK_FALSE(lp.positives.intersects(lp.negatives));
  }
  const auto odd = generate_random_problems(e, 3, 7, 3);
  CHECK(odd[0].positives.count() == 4);
  CHECK(odd[0].negatives.count() == 3);

  const auto again = generate_random_problems(e, 20, 10, 3);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(again[i].positives == ps[i].positives);
    CHECK(again[i].negatives == ps[i].negatives);
  }

  RetrievalEngine toy(kb_from(nero::testing::kToyKb));
  const auto tiny = generate_random_problems(toy, 5, 2, 1);
  for (const auto& lp : tiny) {
    CHECK(lp.positives.count() == 1);
    CHECK(lp.negatives.count() == 1);
    CHECK(lp.positives != lp.negatives);
  }
  CHECK_THROWS_AS(generate_random_problems(toy, 1, 4, 1), ConfigError);
  CHECK_THROWS_AS(generate_random_problems(toy, 1, 1, 1), ConfigError);
}

TEST_CASE("concept problems have a goal among the targets") {
  RetrievalEngine e(make_family_kb(1));
  const auto ts = build_targets(e, Refiner(e), 100, 3, 1);
  const auto ps = generate_concept_problems(ts, 30, 5, 2);
  for (const auto& lp : ps) {
    CHECK(lp.positives.count() == 5);
    CHECK(lp.negatives.count() == 5);
    bool goal = false;
    for (const auto& c : ts.targets) goal = goal || is_goal(e, c, lp);
    CHECK(goal);
  }
}

TEST_CASE("problem files") {
  const std::vector<NamedProblem> ps{{"first", {"a", "b"}, {"c"}}, {"second", {"c"}, {}}};
  std::stringstream buf;
  write_problems_json(buf, ps);
  const auto back = read_problems_json(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "first");
  CHECK(back[0].positives == ps[0].positives);
  CHECK(back[1].negatives.empty());

  std::istringstream single(R"({"positives": ["a"], "negatives": ["b"]})");
  const auto one = read_problems_json(single);
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == "problem-0");

  std::istringstream array(R"([{"positives": ["a"], "negatives": []}, {"id": "x", "positives": ["b"], "negatives": ["a"]}])");
  CHECK(read_problems_json(array).size() == 2);

  std::istringstream broken(R"({"positives": ["a"]})");
  CHECK_THROWS_AS(read_problems_json(broken), ParseError);
  std::istringstream garbage("{not json");
  CHECK_THROWS_AS(read_problems_json(garbage), ParseError);
  std::istringstream wrong_type(R"({"positives": [1], "negatives": []})");
  CHECK_THROWS_AS(read_problems_json(wrong_type), ParseError);
}

TEST_CASE("aggregates recompute from rows") {
  const auto r = sample_report();
  REQUIRE(r.aggregates.size() == 2);
  // failed rows are excluded
  CHECK(r.aggregates[1].count == 1);
  const auto& nero = r.aggregates[0];
  CHECK(nero.solver == "nero");
  CHECK(nero.count == 2);
  const double mean = (0.8 + 1.0) / 2;
  CHECK(std::abs(nero.f1_mean - mean) < 1e-12);
  CHECK(std::abs(nero.f1_std - std::sqrt(((0.8 - mean) * (0.8 - mean) + (1.0 - mean) * (1.0 - mean)) / 2)) < 1e-12);
  CHECK(std::abs(nero.explored_mean - 51.5) < 1e-12);
  CHECK(std::abs(nero.explored_std - 48.5) < 1e-12);
}

TEST_CASE("reports round-trip through JSON and CSV") {
  const auto r = sample_report();
  std::stringstream json, csv;
  write_report_json(json, r);
  write_report_csv(csv, r);
  CHECK(read_report_json(json) == r);
  CHECK(read_report_csv(csv) == r);

  std::istringstream bad("solver,count\n");
  CHECK_THROWS_AS(read_report_csv(bad), FormatError);
  std::istringstream bad_json("{\"rows\": 3}");
  CHECK_THROWS_AS(read_report_json(bad_json), FormatError);
}

TEST_CASE("CSV layout") {
  std::stringstream csv;
  write_report_csv(csv, sample_report());
  const auto text = csv.str();
  CHECK(text.rfind("problem,solver,f1,runtime_s,explored,best_concept,termination,error\n", 0) == 0);
  CHECK(text.find("\n\nsolver,count,f1_mean,f1_std,runtime_mean,runtime_std,explored_mean,explored_std\n") !=
        std::string::npos);
}

TEST_CASE("benchmark configuration errors") {
  auto& f = fixture();
  BenchmarkSpec spec;
  spec.kb_path = f.kb_path;
  spec.model_path = f.model_path;
  CHECK_THROWS_AS(run_benchmark(spec), ConfigError);  // no problems
  spec.random = RandomProblemSpec{0, 10};
  CHECK_THROWS_AS(run_benchmark(spec), ConfigError);
  spec.random = RandomProblemSpec{2, 10};
  spec.model_path.clear();
  CHECK_THROWS_AS(run_benchmark(spec), ConfigError);
  spec.solvers = {SolverKind::Celoe};
  spec.search.max_nodes = 50;
  CHECK_NOTHROW(run_benchmark(spec));
  spec.kb_path = f.dir.file("missing.kb");
  CHECK_THROWS_AS(run_benchmark(spec), Error);
}

TEST_CASE("benchmark over 50 random problems") {
  auto& f = fixture();
  BenchmarkSpec spec;
  spec.kb_path = f.kb_path;
  spec.model_path = f.model_path;
  spec.random = RandomProblemSpec{50, 10};
  spec.seed = 4;
  spec.output_path = f.dir.file("report.csv");
  auto report = run_benchmark(spec);
  REQUIRE(report.rows.size() == 50);
  REQUIRE(report.aggregates.size() == 1);
  CHECK(report.aggregates[0].count == 50);
  for (const auto& row : report.rows) {
    CHECK(row.error.empty());
    if (row.termination != "goal") CHECK(row.explored == 100);
  }
  std::ifstream written(spec.output_path);
  CHECK(read_report_csv(written) == report);

  // identical up to the clock, also when spread over threads
  spec.output_path.clear();
  spec.jobs = 4;
  auto parallel = run_benchmark(spec);
  strip_clock(report);
  strip_clock(parallel);
  CHECK(parallel == report);
}

TEST_CASE("benchmark rows: solvers, reload and per-problem errors") {
  auto& f = fixture();
  BenchmarkSpec spec;
  spec.kb_path = f.kb_path;
  spec.model_path = f.model_path;
  const auto kb = load_kb_file(f.kb_path);
  const auto& ind = kb.individuals.names();
  spec.problems = {{"ok", {ind[0], ind[3]}, {ind[1]}}, {"broken", {"nobody"}, {ind[1]}}, {"ok2", {ind[5]}, {ind[7], ind[9]}}};
  spec.solvers = {SolverKind::Nero, SolverKind::Celoe, SolverKind::NeroDagger};
  spec.search.max_nodes = 200;
  spec.reload_per_problem = true;
  spec.output_path = f.dir.file("report.json");
  const auto report = run_benchmark(spec);
  REQUIRE(report.rows.size() == 9);
  CHECK(report.rows[0].problem == "ok");
  CHECK(report.rows[1].solver == "celoe");
  CHECK(report.rows[2].solver == "nero_dagger");
  for (std::size_t i = 3; i < 6; ++i) CHECK(report.rows[i].error.find("nobody") != std::string::npos);
  for (std::size_t i : {0, 1, 2, 6, 7, 8}) {
    CHECK(report.rows[i].error.empty());
    CHECK_FALSE(report.rows[i].best_concept.empty());
  }
  CHECK(report.rows[2].f1 >= report.rows[0].f1);
  for (const auto& a : report.aggregates) CHECK(a.count == 2);
  std::ifstream written(spec.output_path);
  CHECK(read_report_json(written) == report);
}

TEST_CASE("solver names") {
  for (auto s : {SolverKind::Nero, SolverKind::Celoe, SolverKind::NeroDagger}) CHECK(solver_from_string(to_string(s)) == s);
  CHECK_FALSE(solver_from_string("eltl").has_value());
}
