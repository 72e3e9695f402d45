#include "nero/retrieval.hpp"

#include <algorithm>
#include <deque>

#include "nero/error.hpp"

namespace nero {

LearningProblem LearningProblem::from_ids(std::size_t universe, std::span<const IndividualId> positives,
                                          std::span<const IndividualId> negatives) {
  for (auto id : positives)
    if (id >= universe) throw ConfigError("positive example index " + std::to_string(id) + " out of range");
  for (auto id : negatives)
    if (id >= universe) throw ConfigError("negative example index " + std::to_string(id) + " out of range");
  LearningProblem lp{IndividualSet::from_range(universe, positives), IndividualSet::from_range(universe, negatives)};
  if (lp.positives.empty()) throw ConfigError("learning problem has no positive examples");
  if (lp.positives.intersects(lp.negatives)) throw ConfigError("positive and negative examples overlap");
  return lp;
}

LearningProblem LearningProblem::from_names(const KnowledgeBase& kb, std::span<const std::string> positives,
                                            std::span<const std::string> negatives) {
  std::vector<IndividualId> pos, neg;
  for (const auto& n : positives) pos.push_back(kb.individual_index(n));
  for (const auto& n : negatives) neg.push_back(kb.individual_index(n));
  return from_ids(kb.num_individuals(), pos, neg);
}

Confusion confusion(const IndividualSet& retrieved, const LearningProblem& lp) {
  Confusion c;
  c.true_positives = lp.positives.intersection_count(retrieved);
  c.false_positives = lp.negatives.intersection_count(retrieved);
  c.false_negatives = lp.positives.count() - c.true_positives;
  return c;
}

double f1_score(const Confusion& c) {
  const double tp = static_cast<double>(c.true_positives);
  const double denom = tp + 0.5 * static_cast<double>(c.false_positives + c.false_negatives);
  return denom == 0.0 ? 0.0 : tp / denom;
}

double f1_score(const IndividualSet& retrieved, const LearningProblem& lp) { return f1_score(confusion(retrieved, lp)); }

bool covers_exactly(const IndividualSet& retrieved, const LearningProblem& lp) {
  return lp.positives.is_subset_of(retrieved) && !lp.negatives.intersects(retrieved);
}

RetrievalEngine::RetrievalEngine(KnowledgeBase kb, std::size_t cache_capacity)
    : kb_(std::make_shared<const KnowledgeBase>(std::move(kb))), cache_capacity_(cache_capacity) {
  const auto n = kb_->num_individuals();
  const auto nc = kb_->concepts.size();
  const auto nr = kb_->roles.size();
  domain_ = IndividualSet::full(n);

  direct_sub_.assign(nc, {});
  direct_sup_.assign(nc, {});
  for (const auto& s : kb_->tbox) {
    if (s.sub == s.sup) continue;
    direct_sup_[s.sub].push_back(s.sup);
    direct_sub_[s.sup].push_back(s.sub);
  }

  // Reflexive-transitive closure: each asserted type propagates to every
  // reachable superconcept.
  std::vector<IndividualSet> asserted(nc, IndividualSet(n));
  for (const auto& t : kb_->types) asserted[t.concept_name].insert(t.individual);
  atomic_ext_.assign(nc, IndividualSet(n));
  std::vector<char> visited(nc);
  for (ConceptNameId b = 0; b < nc; ++b) {
    if (asserted[b].empty()) continue;
    std::fill(visited.begin(), visited.end(), 0);
    std::deque<ConceptNameId> queue{b};
    visited[b] = 1;
    while (!queue.empty()) {
      const auto a = queue.front();
      queue.pop_front();
      atomic_ext_[a] |= asserted[b];
      for (auto sup : direct_sup_[a])
        if (!visited[sup]) {
          visited[sup] = 1;
          queue.push_back(sup);
        }
    }
  }

  role_succ_.assign(nr, std::vector<std::vector<IndividualId>>(n));
  role_has_edge_.assign(nr, IndividualSet(n));
  for (const auto& r : kb_->relations) {
    role_succ_[r.role][r.subject].push_back(r.object);
    role_has_edge_[r.role].insert(r.subject);
  }
  for (auto& per_role : role_succ_)
    for (auto& succ : per_role) {
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
}

IndividualSet RetrievalEngine::retrieve(const Concept& c) const { return evaluate(c); }

IndividualSet RetrievalEngine::evaluate(const Concept& c) const {
  switch (c.kind()) {
    case ConceptKind::Top:
      return domain_;
    case ConceptKind::Bottom:
      return IndividualSet(domain_.universe());
    case ConceptKind::Atomic:
      return atomic_ext_[kb_->concept_index(c.name())];
    default:
      break;
  }

  IndividualSet result;
  if (cache_lookup(c.key(), result)) return result;

  switch (c.kind()) {
    case ConceptKind::Not:
      result = evaluate(c.operand()).complement();
      break;
    case ConceptKind::And:
      result = evaluate(c.left()) & evaluate(c.right());
      break;
    case ConceptKind::Or:
      result = evaluate(c.left()) | evaluate(c.right());
      break;
    case ConceptKind::Exists: {
      const auto r = kb_->role_index(c.name());
      const IndividualSet filler = evaluate(c.operand());
      result = IndividualSet(domain_.universe());
      role_has_edge_[r].for_each([&](IndividualId x) {
        const auto& succ = role_succ_[r][x];
        if (std::any_of(succ.begin(), succ.end(), [&](IndividualId y) { return filler.contains(y); })) result.insert(x);
      });
      break;
    }
    case ConceptKind::Forall: {
      const auto r = kb_->role_index(c.name());
      const IndividualSet filler = evaluate(c.operand());
      // Individuals without r-successors satisfy ∀r.C vacuously.
      result = role_has_edge_[r].complement();
      role_has_edge_[r].for_each([&](IndividualId x) {
        const auto& succ = role_succ_[r][x];
        if (std::all_of(succ.begin(), succ.end(), [&](IndividualId y) { return filler.contains(y); })) result.insert(x);
      });
      break;
    }
    default:
      break;
  }
  cache_store(c.key(), result);
  return result;
}

bool RetrievalEngine::cache_lookup(const std::string& key, IndividualSet& out) const {
  if (cache_capacity_ == 0) return false;
  std::lock_guard lock(cache_mutex_);
  auto it = cache_index_.find(key);
  if (it == cache_index_.end()) return false;
  lru_.splice(lru_.begin(), lru_, it->second);
  out = it->second->second;
  return true;
}

void RetrievalEngine::cache_store(const std::string& key, const IndividualSet& value) const {
  if (cache_capacity_ == 0) return;
  std::lock_guard lock(cache_mutex_);
  if (cache_index_.count(key)) return;
  lru_.emplace_front(key, value);
  cache_index_.emplace(key, lru_.begin());
  while (lru_.size() > cache_capacity_) {
    cache_index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::size_t RetrievalEngine::cache_size() const {
  std::lock_guard lock(cache_mutex_);
  return lru_.size();
}

double f1(const RetrievalEngine& engine, const Concept& c, const LearningProblem& lp) {
  return f1_score(engine.retrieve(c), lp);
}

bool is_goal(const RetrievalEngine& engine, const Concept& c, const LearningProblem& lp) {
  return covers_exactly(engine.retrieve(c), lp);
}

}  // namespace nero
