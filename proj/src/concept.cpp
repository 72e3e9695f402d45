#include "nero/concept.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <vector>

#include "nero/error.hpp"

namespace nero {

struct Concept::Node {
  ConceptKind kind;
  std::string name;
  std::optional<Concept> a;
  std::optional<Concept> b;
  std::size_t length;
  std::size_t depth;
  std::string key;
};

namespace {

bool is_binary(ConceptKind k) { return k == ConceptKind::And || k == ConceptKind::Or; }

struct Symbols {
  std::string_view top, bottom, neg, conj, disj, exists, forall;
};

constexpr Symbols kAscii{"Top", "Bottom", "not ", " and ", " or ", "exists ", "forall "};
constexpr Symbols kUnicode{"⊤", "⊥", "¬", " ⊓ ", " ⊔ ", "∃ ", "∀ "};

// Parenthesization decisions are shared by the key builder and render_concept.
bool wrap_unary_operand(ConceptKind child) { return is_binary(child); }
bool wrap_left(ConceptKind parent, ConceptKind child) { return parent == ConceptKind::And && child == ConceptKind::Or; }
bool wrap_right(ConceptKind parent, ConceptKind child) {
  return parent == ConceptKind::And ? is_binary(child) : child == ConceptKind::Or;
}

std::string paren_if(bool wrap, const std::string& s) { return wrap ? "(" + s + ")" : s; }

std::string render_with(const Concept& c, const Symbols& sym) {
  switch (c.kind()) {
    case ConceptKind::Top:
      return std::string(sym.top);
    case ConceptKind::Bottom:
      return std::string(sym.bottom);
    case ConceptKind::Atomic:
      return c.name();
    case ConceptKind::Not:
      return std::string(sym.neg) + paren_if(wrap_unary_operand(c.operand().kind()), render_with(c.operand(), sym));
    case ConceptKind::And:
    case ConceptKind::Or:
      return paren_if(wrap_left(c.kind(), c.left().kind()), render_with(c.left(), sym)) +
             std::string(c.kind() == ConceptKind::And ? sym.conj : sym.disj) +
             paren_if(wrap_right(c.kind(), c.right().kind()), render_with(c.right(), sym));
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      return std::string(c.kind() == ConceptKind::Exists ? sym.exists : sym.forall) + c.name() + "." +
             paren_if(wrap_unary_operand(c.operand().kind()), render_with(c.operand(), sym));
  }
  return {};
}

}  // namespace

Concept::Concept() : Concept(top()) {}

Concept Concept::top() {
  static const Concept t(std::make_shared<const Node>(Node{ConceptKind::Top, "", {}, {}, 1, 0, "Top"}));
  return t;
}

Concept Concept::bottom() {
  static const Concept b(std::make_shared<const Node>(Node{ConceptKind::Bottom, "", {}, {}, 1, 0, "Bottom"}));
  return b;
}

Concept Concept::atomic(std::string name) {
  std::string key = name;
  return Concept(std::make_shared<const Node>(Node{ConceptKind::Atomic, std::move(name), {}, {}, 1, 0, std::move(key)}));
}

Concept Concept::negation(Concept operand) {
  std::string key = "not " + paren_if(wrap_unary_operand(operand.kind()), operand.key());
  const auto len = 1 + operand.length();
  const auto dep = 1 + operand.depth();
  return Concept(std::make_shared<const Node>(Node{ConceptKind::Not, "", std::move(operand), {}, len, dep, std::move(key)}));
}

namespace {

template <typename Make>
Concept make_binary(ConceptKind kind, Concept left, Concept right, Make make) {
  if (right.key() < left.key()) std::swap(left, right);
  return make(kind, std::move(left), std::move(right));
}

}  // namespace

Concept Concept::conjunction(Concept left, Concept right) {
  return make_binary(ConceptKind::And, std::move(left), std::move(right), [](ConceptKind k, Concept l, Concept r) {
    std::string key = paren_if(wrap_left(k, l.kind()), l.key()) + " and " + paren_if(wrap_right(k, r.kind()), r.key());
    const auto len = 1 + l.length() + r.length();
    const auto dep = 1 + std::max(l.depth(), r.depth());
    return Concept(std::make_shared<const Node>(Node{k, "", std::move(l), std::move(r), len, dep, std::move(key)}));
  });
}

Concept Concept::disjunction(Concept left, Concept right) {
  return make_binary(ConceptKind::Or, std::move(left), std::move(right), [](ConceptKind k, Concept l, Concept r) {
    std::string key = paren_if(wrap_left(k, l.kind()), l.key()) + " or " + paren_if(wrap_right(k, r.kind()), r.key());
    const auto len = 1 + l.length() + r.length();
    const auto dep = 1 + std::max(l.depth(), r.depth());
    return Concept(std::make_shared<const Node>(Node{k, "", std::move(l), std::move(r), len, dep, std::move(key)}));
  });
}

Concept Concept::exists(std::string role, Concept filler) {
  std::string key = "exists " + role + "." + paren_if(wrap_unary_operand(filler.kind()), filler.key());
  const auto len = 2 + filler.length();
  const auto dep = 1 + filler.depth();
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::Exists, std::move(role), std::move(filler), {}, len, dep, std::move(key)}));
}

Concept Concept::forall(std::string role, Concept filler) {
  std::string key = "forall " + role + "." + paren_if(wrap_unary_operand(filler.kind()), filler.key());
  const auto len = 2 + filler.length();
  const auto dep = 1 + filler.depth();
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::Forall, std::move(role), std::move(filler), {}, len, dep, std::move(key)}));
}

ConceptKind Concept::kind() const { return node_->kind; }
const std::string& Concept::name() const { return node_->name; }
std::size_t Concept::length() const { return node_->length; }
std::size_t Concept::depth() const { return node_->depth; }
const std::string& Concept::key() const { return node_->key; }

const Concept& Concept::operand() const {
  if (!node_->a || is_binary(node_->kind)) throw Error("concept '" + key() + "' has no single operand");
  return *node_->a;
}

const Concept& Concept::left() const {
  if (!is_binary(node_->kind)) throw Error("concept '" + key() + "' is not binary");
  return *node_->a;
}

const Concept& Concept::right() const {
  if (!is_binary(node_->kind)) throw Error("concept '" + key() + "' is not binary");
  return *node_->b;
}

std::string render_concept(const Concept& c, Notation style) {
  return style == Notation::Ascii ? c.key() : render_with(c, kUnicode);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { LParen, RParen, Dot, Not, And, Or, Exists, Forall, Top, Bottom, Ident, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool is_ident_byte(unsigned char ch) {
  return ch > 0x20 && ch < 0x80 && ch != '(' && ch != ')' && ch != '.' && ch != ',' && ch != '"' && ch != '#';
}

std::vector<Token> tokenize(std::string_view text) {
  static const std::array<std::pair<std::string_view, Tok>, 7> unicode_ops = {{
      {"¬", Tok::Not},
      {"⊓", Tok::And},
      {"⊔", Tok::Or},
      {"∃", Tok::Exists},
      {"∀", Tok::Forall},
      {"⊤", Tok::Top},
      {"⊥", Tok::Bottom},
  }};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto ch = static_cast<unsigned char>(text[i]);
    if (std::isspace(ch)) {
      ++i;
      continue;
    }
    if (ch == '(' || ch == ')' || ch == '.') {
      out.push_back({ch == '(' ? Tok::LParen : ch == ')' ? Tok::RParen : Tok::Dot, std::string(1, text[i]), i});
      ++i;
      continue;
    }
    if (ch >= 0x80) {
      bool matched = false;
      for (auto [sym, tok] : unicode_ops) {
        if (text.substr(i, sym.size()) == sym) {
          out.push_back({tok, std::string(sym), i});
          i += sym.size();
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError("unknown token at offset " + std::to_string(i), i);
      continue;
    }
    if (!is_ident_byte(ch)) throw ParseError("unknown token '" + std::string(1, text[i]) + "' at offset " + std::to_string(i), i);
    const auto start = i;
    while (i < text.size() && is_ident_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::string word(text.substr(start, i - start));
    Tok kind = Tok::Ident;
    if (word == "not") kind = Tok::Not;
    else if (word == "and") kind = Tok::And;
    else if (word == "or") kind = Tok::Or;
    else if (word == "exists") kind = Tok::Exists;
    else if (word == "forall") kind = Tok::Forall;
    else if (word == "Top") kind = Tok::Top;
    else if (word == "Bottom") kind = Tok::Bottom;
    out.push_back({kind, std::move(word), start});
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Concept parse() {
    Concept c = disjunction();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return c;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at offset " + std::to_string(peek().pos) + ": " + msg, peek().pos);
  }

  Concept disjunction() {
    Concept c = conjunction();
    while (peek().kind == Tok::Or) {
      take();
      c = Concept::disjunction(std::move(c), conjunction());
    }
    return c;
  }

  Concept conjunction() {
    Concept c = unary();
    while (peek().kind == Tok::And) {
      take();
      c = Concept::conjunction(std::move(c), unary());
    }
    return c;
  }

  Concept unary() {
    switch (peek().kind) {
      case Tok::Not:
        take();
        return Concept::negation(unary());
      case Tok::Exists:
      case Tok::Forall: {
        const bool ex = take().kind == Tok::Exists;
        if (peek().kind != Tok::Ident) fail("expected role name");
        std::string role = take().text;
        if (peek().kind != Tok::Dot) fail("expected '.' after role name");
        take();
        Concept filler = unary();
        return ex ? Concept::exists(std::move(role), std::move(filler))
                  : Concept::forall(std::move(role), std::move(filler));
      }
      default:
        return primary();
    }
  }

  Concept primary() {
    switch (peek().kind) {
      case Tok::Top:
        take();
        return Concept::top();
      case Tok::Bottom:
        take();
        return Concept::bottom();
      case Tok::Ident:
        return Concept::atomic(take().text);
      case Tok::LParen: {
        take();
        Concept c = disjunction();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return c;
      }
      case Tok::End:
        fail("unexpected end of expression");
      default:
        fail("unexpected '" + peek().text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Concept parse_concept(std::string_view text) {
  auto tokens = tokenize(text);
  if (tokens.size() == 1) throw ParseError("empty concept expression", 0);
  return Parser(std::move(tokens)).parse();
}

}  // namespace nero
