#pragma once

// Seeded property sweeps shared by the unit tests and the acceptance gate.

#include "oracle.hpp"

#include "branchlab/catalog.hpp"
#include "branchlab/dsl.hpp"
#include "branchlab/measure.hpp"

#include <sstream>
#include <string>

namespace properties {

using namespace branchlab;
using oracle::GenWord;
using oracle::TreeOracle;

struct Outcome {
  bool ok = true;
  std::size_t cases = 0;
  std::string detail;

  void fail(const std::string& what) {
    if (ok) detail = what;
    ok = false;
  }
};

inline std::string show(const GroupPtr& group, const GenWord& w) { return oracle::to_element(group, w).to_string(); }

inline bool same_on_level(const Automorphism& g, const TreeOracle& oracle, const GenWord& w, std::size_t k) {
  unsigned d = g.group()->degree();
  auto images = oracle.level_images(w, k);
  for (std::size_t i = 0; i < images.size(); ++i)
    if (apply(g, Vertex::from_index(i, k, d)).index(d) != images[i]) return false;
  return true;
}

inline std::vector<GroupPtr> sample_groups() {
  return {load("grigorchuk").group, load("gupta-sidki-3").group, load("binary-odometer").group, switch_group(4)};
}

// Associativity, identity and inverses, against the oracle action on one level.
inline Outcome group_laws(std::uint64_t seed, std::size_t trials, std::size_t level = 5) {
  Outcome out;
  std::mt19937_64 rng(seed);
  for (const auto& group : sample_groups()) {
    TreeOracle oracle(group);
    for (std::size_t t = 0; t < trials; ++t) {
      GenWord a = oracle::random_word(group, 6, rng);
      GenWord b = oracle::random_word(group, 6, rng);
      GenWord c = oracle::random_word(group, 6, rng);
      auto g = oracle::to_element(group, a);
      auto h = oracle::to_element(group, b);
      auto k = oracle::to_element(group, c);
      auto left = compose(compose(g, h), k);
      auto right = compose(g, compose(h, k));
      GenWord abc = oracle::concat(oracle::concat(a, b), c);
      ++out.cases;
      if (!same_on_level(left, oracle, abc, level) || !same_on_level(right, oracle, abc, level))
        out.fail("associativity against oracle for " + show(group, abc));
      if (!equal(left, right)) out.fail("(gh)k != g(hk) for " + show(group, abc));
      if (!is_trivial(compose(g, inverse(g)))) out.fail("g g^-1 nontrivial for " + g.to_string());
      if (!is_trivial(compose(inverse(g), g))) out.fail("g^-1 g nontrivial for " + g.to_string());
      if (!equal(compose(g, Automorphism::identity(group)), g)) out.fail("g e != g for " + g.to_string());
      if (!same_on_level(inverse(g), oracle, oracle::inverse(a), level))
        out.fail("inverse action differs for " + g.to_string());
    }
  }
  return out;
}

// (gh)|_v = g|_{h(v)} h|_v, and g(vw) = g(v) g|_v(w).
inline Outcome cocycle(std::uint64_t seed, std::size_t trials) {
  Outcome out;
  std::mt19937_64 rng(seed);
  for (const auto& group : sample_groups()) {
    TreeOracle oracle(group);
    unsigned d = group->degree();
    for (std::size_t t = 0; t < trials; ++t) {
      GenWord a = oracle::random_word(group, 6, rng);
      GenWord b = oracle::random_word(group, 6, rng);
      auto g = oracle::to_element(group, a);
      auto h = oracle::to_element(group, b);
      std::size_t level = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
      std::uint64_t count = 1;
      for (std::size_t i = 0; i < level; ++i) count *= d;
      Vertex v = Vertex::from_index(std::uniform_int_distribution<std::uint64_t>(0, count - 1)(rng), level, d);
      ++out.cases;
      auto lhs = section(compose(g, h), v);
      auto rhs = compose(section(g, apply(h, v)), section(h, v));
      if (!equal(lhs, rhs)) out.fail("cocycle fails for " + g.to_string() + ", " + h.to_string() + " at " + v.to_string());
      // Action through the section against the oracle, three levels further down.
      auto gv = section(g, v);
      Vertex image = apply(g, v);
      for (std::uint64_t i = 0; i < d * d * d; ++i) {
        Vertex tail = Vertex::from_index(i, 3, d);
        std::vector<Letter> full = v.letters();
        full.insert(full.end(), tail.letters().begin(), tail.letters().end());
        std::vector<Letter> expect = image.letters();
        auto moved = apply(gv, tail);
        expect.insert(expect.end(), moved.letters().begin(), moved.letters().end());
        if (oracle.apply(a, full) != expect) {
          out.fail("section action differs for " + g.to_string() + " at " + v.to_string());
          break;
        }
      }
    }
  }
  return out;
}

// m_k = fixed fraction at level k is non-increasing, the interior fraction non-decreasing,
// and the exact measure sits between them.
inline Outcome level_monotone(std::uint64_t seed, std::size_t trials, std::size_t max_level = 8) {
  Outcome out;
  std::mt19937_64 rng(seed);
  for (const auto& group : sample_groups()) {
    TreeOracle oracle(group);
    unsigned d = group->degree();
    std::size_t levels = d == 2 ? max_level : max_level / 2 + 1;
    for (std::size_t t = 0; t < trials; ++t) {
      GenWord a = oracle::random_word(group, 6, rng);
      auto g = oracle::to_element(group, a);
      WordEngine engine(*group);
      auto counts = level_counts(engine, engine.reduce(g.word()), levels, kDefaultBudget);
      Rational exact = fix_measure(g);
      ++out.cases;
      Integer scale = 1;
      for (std::size_t k = 0; k <= levels; ++k) {
        Rational fixed(counts.fixed[k], scale);
        Rational interior(counts.interior[k], scale);
        if (interior > exact || exact > fixed) out.fail("measure outside level bracket for " + g.to_string());
        if (k > 0) {
          Rational prev_fixed(counts.fixed[k - 1], scale / d);
          Rational prev_interior(counts.interior[k - 1], scale / d);
          if (fixed > prev_fixed) out.fail("m_k increases for " + g.to_string());
          if (interior < prev_interior) out.fail("interior fraction decreases for " + g.to_string());
        }
        if (k <= 6) {
          auto images = oracle.level_images(a, k);
          Integer fixed_count = 0;
          for (std::size_t i = 0; i < images.size(); ++i) fixed_count += images[i] == i ? 1 : 0;
          if (fixed_count != counts.fixed[k]) out.fail("fixed count differs from oracle for " + g.to_string());
        }
        scale *= d;
      }
    }
  }
  return out;
}

// portrait(g, D) is trivial exactly when g acts trivially on level D; it reproduces the
// action on level D; trivial elements have trivial portraits at every depth.
inline Outcome portrait_consistency(std::uint64_t seed, std::size_t trials, std::size_t depth = 5) {
  Outcome out;
  std::mt19937_64 rng(seed);
  for (const auto& group : sample_groups()) {
    TreeOracle oracle(group);
    unsigned d = group->degree();
    std::size_t max_depth = d == 2 ? depth : 3;
    for (std::size_t t = 0; t < trials; ++t) {
      GenWord a = oracle::random_word(group, 8, rng);
      // Half the cases are relators of the form w w^-1 conjugated, to exercise triviality.
      if (t % 2 == 1) {
        GenWord b = oracle::random_word(group, 4, rng);
        a = oracle::concat(oracle::concat(b, oracle::concat(a, oracle::inverse(a))), oracle::inverse(b));
      }
      auto g = oracle::to_element(group, a);
      bool trivial = is_trivial(g);
      ++out.cases;
      for (std::size_t k = 0; k <= max_depth; ++k) {
        Portrait pic = portrait(g, k);
        bool level_trivial = oracle.trivial_on_level(a, k);
        if (pic.is_trivial() != level_trivial) out.fail("portrait triviality differs at depth " + std::to_string(k) + " for " + g.to_string());
        if (trivial && !pic.is_trivial()) out.fail("trivial element with nontrivial portrait: " + g.to_string());
        auto images = oracle.level_images(a, k);
        for (std::size_t i = 0; i < images.size(); ++i)
          if (pic.apply(Vertex::from_index(i, k, d)).index(d) != images[i]) {
            out.fail("portrait action differs for " + g.to_string());
            break;
          }
        auto rebuilt = Automorphism::from_portrait(group, pic);
        if (!same_on_level(rebuilt, oracle, a, k)) out.fail("from_portrait differs for " + g.to_string());
      }
      if (!trivial && d == 2) {
        bool seen = false;
        for (std::size_t k = 1; k <= 12 && !seen; ++k) seen = !portrait(g, k).is_trivial();
        if (!seen) out.fail("nontrivial element with trivial portraits to depth 12: " + g.to_string());
      }
    }
  }
  return out;
}

inline GroupPtr random_group(std::mt19937_64& rng) {
  unsigned d = std::uniform_int_distribution<unsigned>(2, 3)(rng);
  std::size_t count = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back(std::string(1, static_cast<char>('p' + i)) + (i % 2 ? "x" : ""));
  auto random_perm = [&] {
    std::vector<Letter> images(d);
    for (unsigned x = 0; x < d; ++x) images[x] = static_cast<Letter>(x);
    std::shuffle(images.begin(), images.end(), rng);
    return Permutation::from_images(images);
  };
  std::vector<GeneratorDef> gens;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::bernoulli_distribution(0.25)(rng)) {
      PortraitBody body;
      std::size_t entries = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      for (std::size_t e = 0; e < entries; ++e) {
        std::size_t level = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
        std::uint64_t span = level == 0 ? 1 : (level == 1 ? d : d * d);
        Vertex v = Vertex::from_index(std::uniform_int_distribution<std::uint64_t>(0, span - 1)(rng), level, d);
        Permutation p = random_perm();
        if (!p.is_identity()) body.entries[v] = p;
      }
      gens.push_back({names[i], body});
      continue;
    }
    RecursionBody body{random_perm(), {}};
    for (unsigned x = 0; x < d; ++x) {
      NamedWord w;
      std::size_t len = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
      for (std::size_t j = 0; j < len; ++j)
        w.push_back({names[std::uniform_int_distribution<std::size_t>(0, count - 1)(rng)], std::bernoulli_distribution(0.3)(rng)});
      body.sections.push_back(w);
    }
    gens.push_back({names[i], body});
  }
  return GroupDef::create(d, std::move(gens));
}

// emit -> parse -> emit is stable and the reparsed generators act identically.
inline Outcome dsl_round_trip(std::uint64_t seed, std::size_t trials) {
  Outcome out;
  std::mt19937_64 rng(seed);
  std::vector<GroupPtr> groups = sample_groups();
  for (std::size_t t = 0; t < trials; ++t) groups.push_back(random_group(rng));
  for (const auto& group : groups) {
    ++out.cases;
    std::string text = emit_group(*group);
    GroupPtr back;
    try {
      back = parse_group(text);
    } catch (const std::exception& e) {
      out.fail(std::string("reparse failed: ") + e.what() + "\n" + text);
      continue;
    }
    if (emit_group(*back) != text) out.fail("emit not stable for\n" + text);
    if (back->generators().size() != group->generators().size() || back->degree() != group->degree()) {
      out.fail("generator set changed for\n" + text);
      continue;
    }
    TreeOracle before(group);
    TreeOracle after(back);
    std::size_t level = group->degree() == 2 ? 5 : 3;
    for (std::size_t g = 0; g < group->generators().size(); ++g) {
      if (before.level_images({{g, false}}, level) != after.level_images({{g, false}}, level))
        out.fail("generator " + group->generators()[g].name + " acts differently after round trip");
      auto element = Automorphism::generator(back, group->generators()[g].name);
      if (!same_on_level(element, before, {{g, false}}, level))
        out.fail("reparsed generator " + group->generators()[g].name + " differs from oracle");
    }
  }
  return out;
}

}  // namespace properties
