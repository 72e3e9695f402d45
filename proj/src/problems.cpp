#include <algorithm>
#include <istream>
#include <ostream>
#include <random>

#include "json.hpp"
#include "nero/error.hpp"
#include "nero/harness.hpp"

namespace nero {
namespace {

std::vector<IndividualId> draw(std::vector<IndividualId> pool, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::vector<LearningProblem> generate_random_problems(const RetrievalEngine& engine, std::size_t count, std::size_t size,
                                                      std::uint64_t seed) {
  const auto n = engine.num_individuals();
  if (size < 2) throw ConfigError("problem size |E| must be at least 2");
  if (size > n) throw ConfigError("problem size |E| = " + std::to_string(size) + " exceeds the " + std::to_string(n) + " individuals");
  std::mt19937_64 rng(seed);
  const auto everyone = engine.domain().to_vector();
  const std::size_t num_pos = (size + 1) / 2;

  std::vector<LearningProblem> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto picked = draw(everyone, size, rng);
    std::span<const IndividualId> all(picked);
    out.push_back(LearningProblem::from_ids(n, all.first(num_pos), all.subspan(num_pos)));
  }
  return out;
}

std::vector<LearningProblem> generate_concept_problems(const TargetSpace& targets, std::size_t count, std::size_t per_side,
                                                       std::uint64_t seed) {
  if (per_side < 1) throw ConfigError("per_side must be at least 1");
  std::vector<std::size_t> eligible;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto inside = targets.retrievals[j].count();
    if (inside >= per_side && targets.retrievals[j].universe() - inside >= per_side) eligible.push_back(j);
  }
  if (eligible.empty()) throw ConfigError("no target has " + std::to_string(per_side) + " instances and non-instances");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  std::vector<LearningProblem> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = targets.retrievals[eligible[pick(rng)]];
    const auto pos = draw(r.to_vector(), per_side, rng);
    const auto neg = draw(r.complement().to_vector(), per_side, rng);
    out.push_back(LearningProblem::from_ids(r.universe(), pos, neg));
  }
  return out;
}

namespace {

NamedProblem problem_from_json(const nlohmann::json& j, std::size_t index) {
  if (!j.is_object() || !j.contains("positives") || !j.contains("negatives"))
    throw ParseError("problem " + std::to_string(index) + " needs 'positives' and 'negatives' arrays", index);
  NamedProblem p;
  p.id = j.contains("id") ? j.at("id").get<std::string>() : "problem-" + std::to_string(index);
  p.positives = j.at("positives").get<std::vector<std::string>>();
  p.negatives = j.at("negatives").get<std::vector<std::string>>();
  return p;
}

}  // namespace

std::vector<NamedProblem> read_problems_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid problem file: ") + e.what(), 0);
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object() && doc.contains("problems")) list = &doc.at("problems");
  std::vector<NamedProblem> out;
  try {
    if (list->is_array()) {
      for (std::size_t i = 0; i < list->size(); ++i) out.push_back(problem_from_json((*list)[i], i));
    } else {
      out.push_back(problem_from_json(*list, 0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid problem file: ") + e.what(), 0);
  }
  return out;
}

void write_problems_json(std::ostream& out, const std::vector<NamedProblem>& problems) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& p : problems) doc.push_back({{"id", p.id}, {"positives", p.positives}, {"negatives", p.negatives}});
  out << nlohmann::json{{"problems", doc}}.dump(2) << '\n';
}

NamedProblem to_named(const KnowledgeBase& kb, const LearningProblem& lp, std::string id) {
  NamedProblem p;
  p.id = std::move(id);
  lp.positives.for_each([&](IndividualId x) { p.positives.push_back(kb.individuals.name(x)); });
  lp.negatives.for_each([&](IndividualId x) { p.negatives.push_back(kb.individuals.name(x)); });
  return p;
}

}  // namespace nero
