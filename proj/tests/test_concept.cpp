#include <random>

#include "doctest.h"
#include "nero/concept.hpp"
#include "nero/error.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace nero;

namespace {

// Counts by walking the rendered tree shape, not Concept::length.
std::size_t count_length(const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Top:
    case ConceptKind::Bottom:
    case ConceptKind::Atomic:
      return 1;
    case ConceptKind::Not:
      return 1 + count_length(c.operand());
    case ConceptKind::And:
    case ConceptKind::Or:
      return 1 + count_length(c.left()) + count_length(c.right());
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      return 2 + count_length(c.operand());
  }
  return 0;
}

const Concept male = Concept::atomic("Male");
const Concept female = Concept::atomic("Female");
const Concept mother = Concept::atomic("Mother");

}  // namespace

TEST_CASE("parse") {
  CHECK(parse_concept("Male") == male);
  CHECK(parse_concept("exists hasSibling.Female") == Concept::exists("hasSibling", female));
  CHECK(parse_concept("not Male or (Female and Mother)") ==
        Concept::disjunction(Concept::negation(male), Concept::conjunction(female, mother)));
  CHECK(parse_concept("Top") == Concept::top());
  CHECK(parse_concept("  Bottom ") == Concept::bottom());
  CHECK(parse_concept("forall r.not A") == Concept::forall("r", Concept::negation(Concept::atomic("A"))));
}

TEST_CASE("parse unicode") {
  CHECK(parse_concept("∃ hasSibling.Female") == Concept::exists("hasSibling", female));
  CHECK(parse_concept("¬Male ⊔ (Female ⊓ Mother)") == parse_concept("not Male or (Female and Mother)"));
  CHECK(parse_concept("∀r.⊥") == Concept::forall("r", Concept::bottom()));
  CHECK(parse_concept("¬⊤") == Concept::negation(Concept::top()));
}

TEST_CASE("precedence and associativity") {
  // ⊓ binds tighter than ⊔
  CHECK(parse_concept("A or B and C") ==
        Concept::disjunction(Concept::atomic("A"), Concept::conjunction(Concept::atomic("B"), Concept::atomic("C"))));
  // restriction filler is a single unary
  CHECK(parse_concept("exists r.A and B") ==
        Concept::conjunction(Concept::exists("r", Concept::atomic("A")), Concept::atomic("B")));
  CHECK(parse_concept("not exists r.A") == Concept::negation(Concept::exists("r", Concept::atomic("A"))));
}

TEST_CASE("parse errors report the offset") {
  auto offset = [](const char* text) {
    try {
      parse_concept(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.location());
    }
    return -1L;
  };
  CHECK(offset("") == 0);
  CHECK(offset("Male and") == 8);
  CHECK(offset("(Male") == 5);
  CHECK(offset("exists .A") == 7);
  CHECK(offset("Male Female") == 5);
  CHECK(offset("A ) B") == 2);
  CHECK(offset("A $ B") == 2);
}

TEST_CASE("render") {
  CHECK(render_concept(Concept::exists("hasSibling", female), Notation::Unicode) == "∃ hasSibling.Female");
  CHECK(render_concept(Concept::top()) == "Top");
  CHECK(render_concept(Concept::conjunction(female, mother), Notation::Unicode) == "Female ⊓ Mother");
  CHECK(render_concept(Concept::negation(male), Notation::Unicode) == "¬Male");
  CHECK(render_concept(parse_concept("not Male or (Female and Mother)")) == "Female and Mother or not Male");
  CHECK(render_concept(parse_concept("not (A and B)")) == "not (A and B)");
  CHECK(render_concept(parse_concept("exists r.(A or B)")) == "exists r.(A or B)");
}

TEST_CASE("length") {
  CHECK(length(male) == 1);
  CHECK(length(Concept::exists("hasSibling", female)) == 3);
  CHECK(length(Concept::disjunction(Concept::negation(male), Concept::conjunction(female, mother))) == 6);
}

TEST_CASE("canonical operand order") {
  CHECK(parse_concept("A and B") == parse_concept("B and A"));
  CHECK(parse_concept("A or B") == parse_concept("B or A"));
  CHECK(std::hash<Concept>{}(parse_concept("A and B")) == std::hash<Concept>{}(parse_concept("B and A")));
  CHECK(parse_concept("A and B") != parse_concept("A or B"));
}

TEST_CASE("random concepts round-trip in both notations") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const auto kb = nero::testing::random_kb(rng, 5, 6, 3);
    for (int i = 0; i < 10; ++i) {
      const auto c = nero::testing::random_concept(rng, kb, 6);
      REQUIRE(c.depth() <= 6);
      const auto ascii = render_concept(c, Notation::Ascii);
      const auto uni = render_concept(c, Notation::Unicode);
      CHECK_MESSAGE(parse_concept(ascii) == c, ascii);
      CHECK_MESSAGE(parse_concept(uni) == c, uni);
      CHECK(parse_concept(ascii).key() == c.key());
      CHECK(length(c) == count_length(c));
    }
  }
}

TEST_CASE("length grows under every constructor") {
  std::mt19937_64 rng(5);
  const auto kb = nero::testing::random_kb(rng, 5, 6, 3);
  for (int i = 0; i < 300; ++i) {
    const auto c = nero::testing::random_concept(rng, kb, 5);
    const auto d = nero::testing::random_concept(rng, kb, 5);
    CHECK(length(c) >= 1);
    CHECK(length(Concept::negation(c)) > length(c));
    CHECK(length(Concept::conjunction(c, d)) > length(c));
    CHECK(length(Concept::disjunction(c, d)) > length(d));
    CHECK(length(Concept::exists("r0", c)) > length(c));
    CHECK(length(Concept::forall("r0", c)) > length(c));
  }
}
