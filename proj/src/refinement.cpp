#include "nero/refinement.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>

#include "nero/error.hpp"

namespace nero {

void RefinementConfig::validate() const {
  if (max_children < 1) throw ConfigError("max_children must be at least 1");
}

Refiner::Refiner(const RetrievalEngine& engine, RefinementConfig cfg) : engine_(&engine), cfg_(cfg) {
  cfg_.validate();
  const auto& kb = engine.kb();
  for (const auto& a : kb.concepts.names()) top_.push_back(Concept::atomic(a));
  if (cfg_.use_negations)
    for (const auto& a : kb.concepts.names()) top_.push_back(Concept::negation(Concept::atomic(a)));
  if (cfg_.use_restrictions) {
    for (const auto& r : kb.roles.names()) top_.push_back(Concept::exists(r, Concept::top()));
    for (const auto& r : kb.roles.names()) top_.push_back(Concept::forall(r, Concept::top()));
  }
}

std::vector<Concept> Refiner::refine(const Concept& c) const {
  std::vector<Concept> raw;
  refine_into(c, raw);
  std::vector<Concept> out;
  std::unordered_set<Concept> seen;
  for (auto& r : raw) {
    if (out.size() >= cfg_.max_children) break;
    if (seen.insert(r).second) out.push_back(std::move(r));
  }
  return out;
}

void Refiner::refine_into(const Concept& c, std::vector<Concept>& out) const {
  const auto& kb = engine_->kb();
  switch (c.kind()) {
    case ConceptKind::Top:
      out.insert(out.end(), top_.begin(), top_.end());
      return;
    case ConceptKind::Bottom:
      return;
    case ConceptKind::Atomic: {
      const auto a = kb.concept_index(c.name());
      for (auto sub : engine_->direct_subsumees(a)) out.push_back(Concept::atomic(kb.concepts.name(sub)));
      for (const auto& d : top_)
        if (d != c) out.push_back(Concept::conjunction(c, d));
      return;
    }
    case ConceptKind::Not: {
      const auto& inner = c.operand();
      if (inner.kind() == ConceptKind::Atomic) {
        const auto a = kb.concept_index(inner.name());
        for (auto sup : engine_->direct_subsumers(a))
          out.push_back(Concept::negation(Concept::atomic(kb.concepts.name(sup))));
      } else if (inner.kind() == ConceptKind::Bottom) {
        out.insert(out.end(), top_.begin(), top_.end());
      }
      return;
    }
    case ConceptKind::And:
    case ConceptKind::Or: {
      const bool conj = c.kind() == ConceptKind::And;
      auto combine = [conj](Concept l, Concept r) {
        return conj ? Concept::conjunction(std::move(l), std::move(r)) : Concept::disjunction(std::move(l), std::move(r));
      };
      std::vector<Concept> part;
      refine_into(c.left(), part);
      for (auto& l : part) out.push_back(combine(std::move(l), c.right()));
      part.clear();
      refine_into(c.right(), part);
      for (auto& r : part) out.push_back(combine(c.left(), std::move(r)));
      if (!conj) {
        out.push_back(c.left());
        out.push_back(c.right());
      }
      return;
    }
    case ConceptKind::Exists:
    case ConceptKind::Forall: {
      kb.role_index(c.name());
      std::vector<Concept> part;
      refine_into(c.operand(), part);
      for (auto& f : part)
        out.push_back(c.kind() == ConceptKind::Exists ? Concept::exists(c.name(), std::move(f))
                                                      : Concept::forall(c.name(), std::move(f)));
      return;
    }
  }
}

TargetSpace build_targets(const RetrievalEngine& engine, const Refiner& refiner, std::size_t d, std::size_t max_length,
                          std::uint64_t seed) {
  if (d == 0) throw ConfigError("target space size d must be at least 1");
  TargetSpace ts;
  std::unordered_set<IndividualSet> seen;

  auto add = [&](Concept c, IndividualSet r, TargetOrigin origin) {
    seen.insert(r);
    ts.targets.push_back(std::move(c));
    ts.retrievals.push_back(std::move(r));
    ts.provenance.push_back(origin);
  };

  for (const auto& c : refiner.top_refinements()) {
    if (c.length() > max_length) continue;
    auto r = engine.retrieve(c);
    if (r.empty() || seen.count(r)) continue;
    add(c, std::move(r), TargetOrigin::TopRefinement);
    if (ts.size() == d) return ts;
  }

  std::mt19937_64 rng(seed);
  std::size_t visited = 0;  // members whose pairs were all tried in earlier passes
  for (;;) {
    const std::size_t snapshot = ts.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t j = visited; j < snapshot; ++j)
      for (std::size_t i = 0; i < j; ++i) pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    std::shuffle(pairs.begin(), pairs.end(), rng);

    bool grew = false;
    for (auto [i, j] : pairs) {
      if (ts.retrievals[i] == ts.retrievals[j]) continue;
      for (int op = 0; op < 2; ++op) {
        // add() may reallocate, so index afresh on every use.
        IndividualSet rx = op == 0 ? (ts.retrievals[i] & ts.retrievals[j]) : (ts.retrievals[i] | ts.retrievals[j]);
        if (rx.empty() || seen.count(rx)) continue;
        Concept x = op == 0 ? Concept::conjunction(ts.targets[i], ts.targets[j])
                            : Concept::disjunction(ts.targets[i], ts.targets[j]);
        // Appended past the snapshot; pairs only index the snapshot.
        add(std::move(x), std::move(rx), TargetOrigin::Combination);
        grew = true;
        if (ts.size() == d) return ts;
      }
    }
    if (!grew) {
      ts.saturated = true;
      warn("target space saturated at " + std::to_string(ts.size()) + " of " + std::to_string(d) + " concepts");
      return ts;
    }
    visited = snapshot;
  }
}

TargetSpace target_space_from(const RetrievalEngine& engine, std::vector<Concept> targets) {
  TargetSpace ts;
  for (auto& c : targets) {
    ts.retrievals.push_back(engine.retrieve(c));
    ts.provenance.push_back(c.kind() == ConceptKind::And || c.kind() == ConceptKind::Or ? TargetOrigin::Combination
                                                                                          : TargetOrigin::TopRefinement);
    ts.targets.push_back(std::move(c));
  }
  return ts;
}

void write_manifest(std::ostream& out, const std::vector<Concept>& targets) {
  for (const auto& c : targets) out << render_concept(c, Notation::Ascii) << '\n';
}

std::vector<Concept> read_manifest(std::istream& in) {
  std::vector<Concept> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(parse_concept(line));
    } catch (const ParseError& e) {
      throw ParseError("manifest line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace nero
