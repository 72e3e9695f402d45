#ifndef NERO_CONCEPT_HPP
#define NERO_CONCEPT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace nero {

enum class ConceptKind : std::uint8_t { Top, Bottom, Atomic, Not, And, Or, Exists, Forall };

enum class Notation { Ascii, Unicode };

/// Immutable ALC concept expression with structural sharing.
///
/// Operands of ⊓ and ⊔ are stored in canonical order (by ASCII rendering),
/// so `A ⊓ B` and `B ⊓ A` are the same value. Equality, ordering and hashing
/// go through the cached canonical rendering, which is injective.
class Concept {
 public:
  /// Defaults to ⊤.
  Concept();

  static Concept top();
  static Concept bottom();
  static Concept atomic(std::string name);
  static Concept negation(Concept operand);
  static Concept conjunction(Concept left, Concept right);
  static Concept disjunction(Concept left, Concept right);
  static Concept exists(std::string role, Concept filler);
  static Concept forall(std::string role, Concept filler);

  ConceptKind kind() const;
  /// Concept name for Atomic, role name for Exists/Forall; empty otherwise.
  const std::string& name() const;
  /// Operand of Not, filler of Exists/Forall.
  const Concept& operand() const;
  const Concept& left() const;
  const Concept& right() const;

  /// Syntactic length: atoms 1, ¬ adds 1, binary adds 1, restriction adds 2.
  std::size_t length() const;
  std::size_t depth() const;

  /// Canonical ASCII rendering, e.g. "Male and exists hasSibling.Female".
  const std::string& key() const;

  friend bool operator==(const Concept& a, const Concept& b) { return a.node_ == b.node_ || a.key() == b.key(); }
  friend bool operator<(const Concept& a, const Concept& b) { return a.key() < b.key(); }

 private:
  struct Node;
  explicit Concept(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses either token style:
///   ASCII:   Top Bottom not and or exists forall
///   Unicode: ⊤ ⊥ ¬ ⊓ ⊔ ∃ ∀
/// Restrictions bind tighter than ¬, ¬ tighter than ⊓, ⊓ tighter than ⊔;
/// binary operators associate to the left. Throws ParseError with the
/// 0-based byte offset of the offending token.
Concept parse_concept(std::string_view text);

/// Renders with minimal parentheses; parse_concept inverts it.
std::string render_concept(const Concept& c, Notation style = Notation::Ascii);

inline std::size_t length(const Concept& c) { return c.length(); }

}  // namespace nero

template <>
struct std::hash<nero::Concept> {
  std::size_t operator()(const nero::Concept& c) const noexcept { return std::hash<std::string>{}(c.key()); }
};

#endif  // NERO_CONCEPT_HPP
