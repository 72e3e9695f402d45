#ifndef NERO_REFINEMENT_HPP
#define NERO_REFINEMENT_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nero/concept.hpp"
#include "nero/individual_set.hpp"
#include "nero/retrieval.hpp"

namespace nero {

struct RefinementConfig {
  bool use_negations = true;
  bool use_restrictions = true;
  std::size_t max_children = 10000;

  void validate() const;
};

/// Downward refinement operator over ALC for a fixed knowledge base:
///
///   ρ(⊤)     = atomics ∪ ¬atomics ∪ {∃r.⊤, ∀r.⊤}
///   ρ(A)     = told subsumees of A ∪ {A ⊓ D | D ∈ ρ(⊤)}
///   ρ(¬A)    = {¬A' | A' told subsumer of A}
///   ρ(C ⊓ D) = in-place refinement of either operand
///   ρ(C ⊔ D) = in-place refinement of either operand ∪ {C, D}
///   ρ(∃r.C)  = {∃r.C' | C' ∈ ρ(C)},  likewise for ∀
///
/// Every refinement retrieves a subset of its parent under closed-world
/// semantics. Output is deduplicated and in deterministic generation order.
class Refiner {
 public:
  explicit Refiner(const RetrievalEngine& engine, RefinementConfig cfg = {});

  std::vector<Concept> refine(const Concept& c) const;
  /// ρ(⊤) before truncation.
  const std::vector<Concept>& top_refinements() const { return top_; }

  const RetrievalEngine& engine() const { return *engine_; }
  const RefinementConfig& config() const { return cfg_; }

 private:
  void refine_into(const Concept& c, std::vector<Concept>& out) const;

  const RetrievalEngine* engine_;
  RefinementConfig cfg_;
  std::vector<Concept> top_;
};

inline std::vector<Concept> refine(const RetrievalEngine& engine, const Concept& c, const RefinementConfig& cfg) {
  return Refiner(engine, cfg).refine(c);
}

enum class TargetOrigin : std::uint8_t { TopRefinement, Combination };

/// Ordered list of pre-selected concepts with pairwise-distinct, nonempty
/// cached retrievals. Order defines the scorer's output coordinates.
struct TargetSpace {
  std::vector<Concept> targets;
  std::vector<IndividualSet> retrievals;
  std::vector<TargetOrigin> provenance;
  /// Set when construction stopped short of the requested size.
  bool saturated = false;

  std::size_t size() const { return targets.size(); }
};

/// Seeds with the members of ρ(⊤) no longer than `max_length`, then grows by
/// conjunctions and disjunctions of retrieval-distinct pairs until `d`
/// targets exist. Pairs are visited in a seed-determined order within each
/// pass. If a whole pass adds nothing, returns early with `saturated` set and
/// a warning. Throws ConfigError when d == 0.
TargetSpace build_targets(const RetrievalEngine& engine, const Refiner& refiner, std::size_t d, std::size_t max_length,
                          std::uint64_t seed);

/// Re-materializes a target space from concepts (e.g. a loaded manifest).
/// Throws UnknownNameError on names the engine's KB lacks.
TargetSpace target_space_from(const RetrievalEngine& engine, std::vector<Concept> targets);

/// One ASCII rendering per line, order-significant.
void write_manifest(std::ostream& out, const std::vector<Concept>& targets);
std::vector<Concept> read_manifest(std::istream& in);

}  // namespace nero

#endif  // NERO_REFINEMENT_HPP
