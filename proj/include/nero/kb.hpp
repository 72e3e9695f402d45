#ifndef NERO_KB_HPP
#define NERO_KB_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nero/individual_set.hpp"

namespace nero {

using ConceptNameId = std::uint32_t;
using RoleId = std::uint32_t;

/// Insertion-ordered string interner. Ids are dense in [0, size()).
class NameRegistry {
 public:
  std::optional<std::uint32_t> find(std::string_view name) const;
  /// Returns the existing id for `name` or appends it.
  std::uint32_t intern(const std::string& name);
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool contains(std::string_view name) const { return find(name).has_value(); }

  friend bool operator==(const NameRegistry& a, const NameRegistry& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// sub ⊑ sup between named concepts. Equivalences are stored as two of these.
struct Subsumption {
  ConceptNameId sub;
  ConceptNameId sup;
  friend auto operator<=>(const Subsumption&, const Subsumption&) = default;
};

/// A(x)
struct TypeAssertion {
  IndividualId individual;
  ConceptNameId concept_name;
  friend auto operator<=>(const TypeAssertion&, const TypeAssertion&) = default;
};

/// r(x, y)
struct RoleAssertion {
  IndividualId subject;
  RoleId role;
  IndividualId object;
  friend auto operator<=>(const RoleAssertion&, const RoleAssertion&) = default;
};

/// TBox/ABox knowledge base over interned names. Plain value type; use
/// KnowledgeBaseBuilder (or load_kb) to get one whose invariants hold.
struct KnowledgeBase {
  NameRegistry concepts;
  NameRegistry roles;
  NameRegistry individuals;
  std::vector<Subsumption> tbox;
  std::vector<TypeAssertion> types;
  std::vector<RoleAssertion> relations;

  std::size_t num_individuals() const { return individuals.size(); }

  /// Lookups that throw UnknownNameError.
  IndividualId individual_index(std::string_view name) const;
  ConceptNameId concept_index(std::string_view name) const;
  RoleId role_index(std::string_view name) const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

/// Interning, kind-checking and deduplicating construction of a KnowledgeBase.
class KnowledgeBaseBuilder {
 public:
  ConceptNameId declare_concept(const std::string& name);
  RoleId declare_role(const std::string& name);
  IndividualId declare_individual(const std::string& name);

  void add_subsumption(const std::string& sub, const std::string& sup);
  void add_equivalence(const std::string& a, const std::string& b);
  void add_type(const std::string& individual, const std::string& concept_name);
  void add_relation(const std::string& subject, const std::string& role, const std::string& object);

  /// Throws Error if the individual set is empty.
  KnowledgeBase build() &&;

 private:
  enum class Kind { Concept, Role, Individual };
  void claim(const std::string& name, Kind kind);

  KnowledgeBase kb_;
  std::unordered_map<std::string, Kind> kinds_;
  std::set<Subsumption> seen_sub_;
  std::set<TypeAssertion> seen_type_;
  std::set<RoleAssertion> seen_rel_;
};

enum class KbFormat { Native, NTriples };

/// Parses a knowledge base. Native format lines:
///   concept A | role r | individual x       (declarations)
///   sub A B | equiv A B | type x A | rel x r y
/// with `#` starting a comment. Throws ParseError carrying the 1-based line.
KnowledgeBase load_kb(std::istream& source, KbFormat format);
KnowledgeBase load_kb_file(const std::string& path);
KbFormat format_for_path(const std::string& path);

/// Serializes to the native format. load_kb(render_kb(kb)) == kb.
std::string render_kb(const KnowledgeBase& kb);

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity;
  std::string message;
};

/// Dangling references and kind clashes are errors; unused names are warnings.
std::vector<Diagnostic> validate(const KnowledgeBase& kb);

/// True when `name` can be written in the concept grammar.
bool is_valid_concept_identifier(std::string_view name);

}  // namespace nero

#endif  // NERO_KB_HPP
