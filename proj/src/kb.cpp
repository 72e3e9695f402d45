#include "nero/kb.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "nero/error.hpp"

namespace nero {

std::optional<std::uint32_t> NameRegistry::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t NameRegistry::intern(const std::string& name) {
  auto [it, inserted] = index_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

IndividualId KnowledgeBase::individual_index(std::string_view name) const {
  if (auto id = individuals.find(name)) return *id;
  throw UnknownNameError("individual", std::string(name));
}

ConceptNameId KnowledgeBase::concept_index(std::string_view name) const {
  if (auto id = concepts.find(name)) return *id;
  throw UnknownNameError("concept", std::string(name));
}

RoleId KnowledgeBase::role_index(std::string_view name) const {
  if (auto id = roles.find(name)) return *id;
  throw UnknownNameError("role", std::string(name));
}

bool is_valid_concept_identifier(std::string_view name) {
  static constexpr std::array<std::string_view, 7> keywords = {"Top", "Bottom", "not", "and", "or", "exists", "forall"};
  if (name.empty()) return false;
  for (auto kw : keywords)
    if (name == kw) return false;
  for (unsigned char ch : name) {
    if (ch <= 0x20 || ch == '(' || ch == ')' || ch == '.' || ch == ',' || ch == '"' || ch == '#') return false;
    // Any non-ASCII byte could belong to one of the Unicode operators.
    if (ch >= 0x80) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builder

void KnowledgeBaseBuilder::claim(const std::string& name, Kind kind) {
  static constexpr std::array<const char*, 3> kind_names = {"concept", "role", "individual"};
  auto [it, inserted] = kinds_.try_emplace(name, kind);
  if (!inserted && it->second != kind) {
    throw Error("'" + name + "' is used as a " + kind_names[static_cast<int>(kind)] + " but was declared as a " +
                kind_names[static_cast<int>(it->second)]);
  }
  if (inserted && kind != Kind::Individual && !is_valid_concept_identifier(name)) {
    throw Error("'" + name + "' is not a valid " + kind_names[static_cast<int>(kind)] + " identifier");
  }
}

ConceptNameId KnowledgeBaseBuilder::declare_concept(const std::string& name) {
  claim(name, Kind::Concept);
  return kb_.concepts.intern(name);
}

RoleId KnowledgeBaseBuilder::declare_role(const std::string& name) {
  claim(name, Kind::Role);
  return kb_.roles.intern(name);
}

IndividualId KnowledgeBaseBuilder::declare_individual(const std::string& name) {
  if (name.empty()) throw Error("empty individual name");
  claim(name, Kind::Individual);
  return kb_.individuals.intern(name);
}

void KnowledgeBaseBuilder::add_subsumption(const std::string& sub, const std::string& sup) {
  Subsumption s{declare_concept(sub), declare_concept(sup)};
  if (seen_sub_.insert(s).second) kb_.tbox.push_back(s);
}

void KnowledgeBaseBuilder::add_equivalence(const std::string& a, const std::string& b) {
  add_subsumption(a, b);
  add_subsumption(b, a);
}

void KnowledgeBaseBuilder::add_type(const std::string& individual, const std::string& concept_name) {
  const auto x = declare_individual(individual);
  TypeAssertion t{x, declare_concept(concept_name)};
  if (seen_type_.insert(t).second) kb_.types.push_back(t);
}

void KnowledgeBaseBuilder::add_relation(const std::string& subject, const std::string& role,
                                        const std::string& object) {
  const auto x = declare_individual(subject);
  const auto r = declare_role(role);
  RoleAssertion a{x, r, declare_individual(object)};
  if (seen_rel_.insert(a).second) kb_.relations.push_back(a);
}

KnowledgeBase KnowledgeBaseBuilder::build() && {
  if (kb_.individuals.size() == 0) throw Error("knowledge base has no individuals");
  return std::move(kb_);
}

// ---------------------------------------------------------------------------
// Native format

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok.front() == '#') break;
    out.push_back(tok);
  }
  return out;
}

KnowledgeBase load_native(std::istream& source) {
  KnowledgeBaseBuilder b;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(source, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tok = split_tokens(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    auto expect = [&](std::size_t n) {
      if (tok.size() != n + 1)
        throw ParseError("line " + std::to_string(lineno) + ": '" + kw + "' expects " + std::to_string(n) +
                             " argument(s), got " + std::to_string(tok.size() - 1),
                         lineno);
    };
    try {
      if (kw == "concept") {
        expect(1);
        b.declare_concept(tok[1]);
      } else if (kw == "role") {
        expect(1);
        b.declare_role(tok[1]);
      } else if (kw == "individual") {
        expect(1);
        b.declare_individual(tok[1]);
      } else if (kw == "sub") {
        expect(2);
        b.add_subsumption(tok[1], tok[2]);
      } else if (kw == "equiv") {
        expect(2);
        b.add_equivalence(tok[1], tok[2]);
      } else if (kw == "type") {
        expect(2);
        b.add_type(tok[1], tok[2]);
      } else if (kw == "rel") {
        expect(3);
        b.add_relation(tok[1], tok[2], tok[3]);
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": unknown directive '" + kw + "'", lineno);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// N-Triples subset

constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";

struct Term {
  enum class Kind { Iri, Blank, Literal } kind;
  std::string value;
};

std::string expand_prefixed(std::string iri) {
  const std::array<std::pair<std::string_view, std::string_view>, 3> prefixes = {
      {{"rdf:", kRdf}, {"rdfs:", kRdfs}, {"owl:", kOwl}}};
  for (auto [prefix, ns] : prefixes)
    if (iri.rfind(prefix, 0) == 0) return std::string(ns) + iri.substr(prefix.size());
  return iri;
}

bool in_vocabulary(const std::string& iri) {
  return iri.rfind(kRdf, 0) == 0 || iri.rfind(kRdfs, 0) == 0 || iri.rfind(kOwl, 0) == 0;
}

class TripleLexer {
 public:
  TripleLexer(const std::string& line, std::size_t lineno) : s_(line), lineno_(lineno) {}

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  Term next() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of line");
    const char c = s_[pos_];
    if (c == '<') {
      const auto end = s_.find('>', pos_);
      if (end == std::string::npos) fail("unterminated IRI");
      Term t{Term::Kind::Iri, expand_prefixed(s_.substr(pos_ + 1, end - pos_ - 1))};
      pos_ = end + 1;
      return t;
    }
    if (c == '_' && pos_ + 1 < s_.size() && s_[pos_ + 1] == ':') {
      const auto start = pos_;
      while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return {Term::Kind::Blank, s_.substr(start, pos_ - start)};
    }
    if (c == '"') {
      std::string value;
      ++pos_;
      for (;;) {
        if (pos_ >= s_.size()) fail("unterminated literal");
        const char ch = s_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= s_.size()) fail("dangling escape in literal");
          value.push_back(s_[pos_++]);
        } else {
          value.push_back(ch);
        }
      }
      if (pos_ < s_.size() && s_[pos_] == '@') {
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '.') ++pos_;
      } else if (s_.compare(pos_, 2, "^^") == 0) {
        pos_ += 2;
        next();
      }
      return {Term::Kind::Literal, value};
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void expect_dot() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected '.' at end of triple");
    ++pos_;
    if (!at_end()) fail("trailing content after '.'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(lineno_) + ": " + msg, lineno_);
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  const std::string& s_;
  std::size_t lineno_;
  std::size_t pos_ = 0;
};

class IriShortener {
 public:
  std::string shorten(const std::string& iri, std::size_t lineno) {
    std::string name = iri;
    if (auto hash = iri.rfind('#'); hash != std::string::npos) {
      name = iri.substr(hash + 1);
    } else if (auto slash = iri.rfind('/'); slash != std::string::npos) {
      name = iri.substr(slash + 1);
    }
    if (name.empty()) throw ParseError("line " + std::to_string(lineno) + ": IRI <" + iri + "> has no local name", lineno);
    auto [it, inserted] = owners_.try_emplace(name, iri);
    if (!inserted && it->second != iri) {
      throw ParseError("line " + std::to_string(lineno) + ": IRIs <" + it->second + "> and <" + iri +
                           "> both shorten to '" + name + "'",
                       lineno);
    }
    return name;
  }

 private:
  std::unordered_map<std::string, std::string> owners_;
};

KnowledgeBase load_ntriples(std::istream& source) {
  KnowledgeBaseBuilder b;
  IriShortener names;
  std::map<std::string, std::size_t> skipped;
  const std::string rdf_type = std::string(kRdf) + "type";
  const std::string sub_class = std::string(kRdfs) + "subClassOf";
  const std::string equiv_class = std::string(kOwl) + "equivalentClass";

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(source, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TripleLexer lex(line, lineno);
    if (lex.at_end()) continue;
    const Term s = lex.next();
    const Term p = lex.next();
    const Term o = lex.next();
    lex.expect_dot();
    if (p.kind != Term::Kind::Iri) lex.fail("predicate must be an IRI");
    if (s.kind == Term::Kind::Literal) lex.fail("subject cannot be a literal");

    if (o.kind == Term::Kind::Literal) {
      ++skipped["literal-valued triples"];
      continue;
    }
    if (s.kind == Term::Kind::Blank || o.kind == Term::Kind::Blank) {
      ++skipped["triples involving blank nodes (complex class expressions)"];
      continue;
    }
    try {
      if (p.value == rdf_type) {
        if (o.value == std::string(kOwl) + "Class" || o.value == std::string(kRdfs) + "Class") {
          b.declare_concept(names.shorten(s.value, lineno));
        } else if (o.value == std::string(kOwl) + "ObjectProperty") {
          b.declare_role(names.shorten(s.value, lineno));
        } else if (o.value == std::string(kOwl) + "NamedIndividual" || o.value == std::string(kOwl) + "Thing") {
          b.declare_individual(names.shorten(s.value, lineno));
        } else if (o.value == std::string(kOwl) + "Ontology") {
          continue;
        } else if (in_vocabulary(o.value)) {
          ++skipped["type declarations outside ALC (" + o.value + ")"];
        } else {
          b.add_type(names.shorten(s.value, lineno), names.shorten(o.value, lineno));
        }
      } else if (p.value == sub_class) {
        if (o.value == std::string(kOwl) + "Thing") {
          b.declare_concept(names.shorten(s.value, lineno));
        } else {
          b.add_subsumption(names.shorten(s.value, lineno), names.shorten(o.value, lineno));
        }
      } else if (p.value == equiv_class) {
        b.add_equivalence(names.shorten(s.value, lineno), names.shorten(o.value, lineno));
      } else if (in_vocabulary(p.value)) {
        ++skipped["axioms with unsupported predicate <" + p.value + ">"];
      } else {
        b.add_relation(names.shorten(s.value, lineno), names.shorten(p.value, lineno), names.shorten(o.value, lineno));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  for (const auto& [what, n] : skipped) warn("ignored " + std::to_string(n) + " " + what);
  return std::move(b).build();
}

}  // namespace

KnowledgeBase load_kb(std::istream& source, KbFormat format) {
  return format == KbFormat::Native ? load_native(source) : load_ntriples(source);
}

KbFormat format_for_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".nt") ? KbFormat::NTriples : KbFormat::Native;
}

KnowledgeBase load_kb_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open knowledge base '" + path + "'");
  return load_kb(in, format_for_path(path));
}

std::string render_kb(const KnowledgeBase& kb) {
  std::ostringstream out;
  for (const auto& c : kb.concepts.names()) out << "concept " << c << '\n';
  for (const auto& r : kb.roles.names()) out << "role " << r << '\n';
  for (const auto& x : kb.individuals.names()) out << "individual " << x << '\n';
  for (const auto& s : kb.tbox) out << "sub " << kb.concepts.name(s.sub) << ' ' << kb.concepts.name(s.sup) << '\n';
  for (const auto& t : kb.types)
    out << "type " << kb.individuals.name(t.individual) << ' ' << kb.concepts.name(t.concept_name) << '\n';
  for (const auto& r : kb.relations)
    out << "rel " << kb.individuals.name(r.subject) << ' ' << kb.roles.name(r.role) << ' '
        << kb.individuals.name(r.object) << '\n';
  return out.str();
}

std::vector<Diagnostic> validate(const KnowledgeBase& kb) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) { out.push_back({Diagnostic::Severity::Error, std::move(msg)}); };
  auto warning = [&](std::string msg) { out.push_back({Diagnostic::Severity::Warning, std::move(msg)}); };

  const auto nc = kb.concepts.size();
  const auto nr = kb.roles.size();
  const auto ni = kb.individuals.size();
  if (ni == 0) error("knowledge base has no individuals");

  std::vector<bool> concept_used(nc, false), role_used(nr, false), individual_used(ni, false);
  for (std::size_t i = 0; i < kb.tbox.size(); ++i) {
    const auto& s = kb.tbox[i];
    if (s.sub >= nc || s.sup >= nc) {
      error("tbox axiom " + std::to_string(i) + " references an unregistered concept");
      continue;
    }
    concept_used[s.sub] = concept_used[s.sup] = true;
  }
  for (std::size_t i = 0; i < kb.types.size(); ++i) {
    const auto& t = kb.types[i];
    if (t.individual >= ni || t.concept_name >= nc) {
      error("type assertion " + std::to_string(i) + " references an unregistered name");
      continue;
    }
    concept_used[t.concept_name] = individual_used[t.individual] = true;
  }
  for (std::size_t i = 0; i < kb.relations.size(); ++i) {
    const auto& r = kb.relations[i];
    if (r.subject >= ni || r.object >= ni || r.role >= nr) {
      error("role assertion " + std::to_string(i) + " references an unregistered name");
      continue;
    }
    role_used[r.role] = individual_used[r.subject] = individual_used[r.object] = true;
  }

  for (const auto& n : kb.concepts.names())
    if (kb.roles.contains(n) || kb.individuals.contains(n)) error("'" + n + "' is registered under more than one kind");
  for (const auto& n : kb.roles.names())
    if (kb.individuals.contains(n)) error("'" + n + "' is registered under more than one kind");

  for (std::size_t i = 0; i < nc; ++i)
    if (!concept_used[i]) warning("concept '" + kb.concepts.name(static_cast<std::uint32_t>(i)) + "' is never used");
  for (std::size_t i = 0; i < nr; ++i)
    if (!role_used[i]) warning("role '" + kb.roles.name(static_cast<std::uint32_t>(i)) + "' is never used");
  for (std::size_t i = 0; i < ni; ++i)
    if (!individual_used[i])
      warning("individual '" + kb.individuals.name(static_cast<std::uint32_t>(i)) + "' has no assertions");
  return out;
}

}  // namespace nero
