#ifndef NERO_RETRIEVAL_HPP
#define NERO_RETRIEVAL_HPP

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nero/concept.hpp"
#include "nero/individual_set.hpp"
#include "nero/kb.hpp"

namespace nero {

/// Positive and negative example individuals. Disjoint, positives nonempty.
struct LearningProblem {
  IndividualSet positives;
  IndividualSet negatives;

  /// Throws ConfigError on overlap, empty positives or out-of-range ids.
  static LearningProblem from_ids(std::size_t universe, std::span<const IndividualId> positives,
                                  std::span<const IndividualId> negatives);
  /// Throws UnknownNameError for names missing from `kb`.
  static LearningProblem from_names(const KnowledgeBase& kb, std::span<const std::string> positives,
                                    std::span<const std::string> negatives);
};

struct Confusion {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

Confusion confusion(const IndividualSet& retrieved, const LearningProblem& lp);
double f1_score(const Confusion& c);
double f1_score(const IndividualSet& retrieved, const LearningProblem& lp);
bool covers_exactly(const IndividualSet& retrieved, const LearningProblem& lp);

/// Closed-world instance retrieval over a knowledge base.
///
/// Named-concept extensions are materialized at construction and closed under
/// the reflexive-transitive TBox subsumption order (so subsumption cycles
/// collapse to equal extensions). Complex concepts are evaluated bottom-up,
/// with an internally synchronized LRU memo keyed by canonical rendering.
class RetrievalEngine {
 public:
  static constexpr std::size_t kDefaultCacheCapacity = 10000;

  explicit RetrievalEngine(KnowledgeBase kb, std::size_t cache_capacity = kDefaultCacheCapacity);

  RetrievalEngine(const RetrievalEngine&) = delete;
  RetrievalEngine& operator=(const RetrievalEngine&) = delete;

  const KnowledgeBase& kb() const { return *kb_; }
  std::size_t num_individuals() const { return domain_.universe(); }
  const IndividualSet& domain() const { return domain_; }

  const IndividualSet& atomic_extension(ConceptNameId a) const { return atomic_ext_.at(a); }
  /// r-successors of x, ascending and deduplicated.
  const std::vector<IndividualId>& successors(RoleId r, IndividualId x) const { return role_succ_.at(r).at(x); }
  const IndividualSet& has_successor(RoleId r) const { return role_has_edge_.at(r); }

  /// Told (non-reflexive) TBox neighbours of a named concept.
  const std::vector<ConceptNameId>& direct_subsumees(ConceptNameId a) const { return direct_sub_.at(a); }
  const std::vector<ConceptNameId>& direct_subsumers(ConceptNameId a) const { return direct_sup_.at(a); }

  /// Throws UnknownNameError for concept or role names not in the KB.
  IndividualSet retrieve(const Concept& c) const;

  std::size_t cache_size() const;

 private:
  IndividualSet evaluate(const Concept& c) const;
  bool cache_lookup(const std::string& key, IndividualSet& out) const;
  void cache_store(const std::string& key, const IndividualSet& value) const;

  std::shared_ptr<const KnowledgeBase> kb_;
  IndividualSet domain_;
  std::vector<IndividualSet> atomic_ext_;
  std::vector<std::vector<std::vector<IndividualId>>> role_succ_;
  std::vector<IndividualSet> role_has_edge_;
  std::vector<std::vector<ConceptNameId>> direct_sub_;
  std::vector<std::vector<ConceptNameId>> direct_sup_;

  std::size_t cache_capacity_;
  mutable std::mutex cache_mutex_;
  mutable std::list<std::pair<std::string, IndividualSet>> lru_;
  mutable std::unordered_map<std::string, std::list<std::pair<std::string, IndividualSet>>::iterator> cache_index_;
};

double f1(const RetrievalEngine& engine, const Concept& c, const LearningProblem& lp);
bool is_goal(const RetrievalEngine& engine, const Concept& c, const LearningProblem& lp);

}  // namespace nero

#endif  // NERO_RETRIEVAL_HPP
