#include <array>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "nero/error.hpp"
#include "nero/harness.hpp"

namespace nero {
namespace {

struct Person {
  std::string name;
  bool male;
  std::vector<std::size_t> parents;
  std::vector<std::size_t> children;
  std::ptrdiff_t spouse = -1;
  int generation;
};

constexpr std::array<std::pair<const char*, const char*>, 27> kTBox = {{
    {"Brother", "Male"},          {"Brother", "PersonWithASibling"},
    {"Child", "Person"},          {"Daughter", "Child"},
    {"Daughter", "Female"},       {"Father", "Male"},
    {"Father", "Parent"},         {"Female", "Person"},
    {"Grandchild", "Child"},      {"Granddaughter", "Female"},
    {"Granddaughter", "Grandchild"}, {"Grandfather", "Grandparent"},
    {"Grandfather", "Male"},      {"Grandmother", "Female"},
    {"Grandmother", "Grandparent"}, {"Grandparent", "Parent"},
    {"Grandson", "Grandchild"},   {"Grandson", "Male"},
    {"Male", "Person"},           {"Mother", "Person"},
    {"Mother", "Parent"},         {"Parent", "Person"},
    {"PersonWithASibling", "Person"}, {"Sister", "Female"},
    {"Sister", "PersonWithASibling"}, {"Son", "Child"},
    {"Son", "Male"},
}};

}  // namespace

KnowledgeBase make_family_kb(std::uint64_t seed, std::size_t num_individuals) {
  if (num_individuals < 2) throw ConfigError("a family knowledge base needs at least 2 people");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num_children(1, 4);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution marries(0.6);

  std::vector<Person> people;
  int family = 0;
  auto make_person = [&](bool male, int generation) {
    const auto id = people.size();
    people.push_back({"F" + std::to_string(family) + (male ? "M" : "F") + std::to_string(id), male, {}, {}, -1, generation});
    return id;
  };
  auto wed = [&](std::size_t a, std::size_t b) {
    people[a].spouse = static_cast<std::ptrdiff_t>(b);
    people[b].spouse = static_cast<std::ptrdiff_t>(a);
  };

  auto add_child = [&](std::size_t f, std::size_t m) {
    const auto child = make_person(coin(rng), people[f].generation + 1);
    people[child].parents = {f, m};
    people[f].children.push_back(child);
    people[m].children.push_back(child);
    return child;
  };

  std::pair<std::size_t, std::size_t> last_couple{0, 1};
  while (people.size() < num_individuals) {
    if (num_individuals - people.size() == 1) {
      add_child(last_couple.first, last_couple.second);
      break;
    }
    ++family;
    std::deque<std::pair<std::size_t, std::size_t>> couples;
    const auto father = make_person(true, 0);
    const auto mother = make_person(false, 0);
    wed(father, mother);
    couples.emplace_back(father, mother);
    while (!couples.empty() && people.size() < num_individuals) {
      auto [f, m] = couples.front();
      couples.pop_front();
      last_couple = {f, m};
      const int n = num_children(rng);
      for (int i = 0; i < n && people.size() < num_individuals; ++i) {
        const auto child = add_child(f, m);
        if (people[child].generation < 3 && people.size() < num_individuals && marries(rng)) {
          const auto spouse = make_person(!people[child].male, people[child].generation);
          wed(child, spouse);
          couples.emplace_back(people[child].male ? child : spouse, people[child].male ? spouse : child);
        }
      }
    }
  }

  KnowledgeBaseBuilder b;
  for (const auto& [sub, sup] : kTBox) b.add_subsumption(sub, sup);
  for (const char* r : {"hasChild", "hasParent", "hasSibling", "married"}) b.declare_role(r);

  for (const auto& p : people) b.declare_individual(p.name);
  for (std::size_t i = 0; i < people.size(); ++i) {
    const auto& p = people[i];
    b.add_type(p.name, p.male ? "Male" : "Female");
    if (!p.parents.empty()) b.add_type(p.name, p.male ? "Son" : "Daughter");
    if (!p.children.empty()) b.add_type(p.name, p.male ? "Father" : "Mother");

    bool has_sibling = false;
    for (auto parent : p.parents)
      for (auto sib : people[parent].children)
        if (sib != i) {
          has_sibling = true;
          b.add_relation(p.name, "hasSibling", people[sib].name);
        }
    if (has_sibling) b.add_type(p.name, p.male ? "Brother" : "Sister");

    bool grandparent = false;
    for (auto c : p.children) {
      b.add_relation(p.name, "hasChild", people[c].name);
      if (!people[c].children.empty()) grandparent = true;
    }
    if (grandparent) b.add_type(p.name, p.male ? "Grandfather" : "Grandmother");

    bool grandchild = false;
    for (auto parent : p.parents) {
      b.add_relation(p.name, "hasParent", people[parent].name);
      if (!people[parent].parents.empty()) grandchild = true;
    }
    if (grandchild) b.add_type(p.name, p.male ? "Grandson" : "Granddaughter");

    if (p.spouse >= 0) b.add_relation(p.name, "married", people[static_cast<std::size_t>(p.spouse)].name);
  }
  return std::move(b).build();
}

}  // namespace nero
