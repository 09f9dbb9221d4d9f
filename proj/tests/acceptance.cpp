// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include "oracle.hpp"
#include "properties.hpp"

#include "branchlab/catalog.hpp"
#include "branchlab/diag.hpp"
#include "branchlab/dsl.hpp"
#include "branchlab/measure.hpp"
#include "branchlab/nonfree.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace branchlab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream note;
  std::vector<std::string> failures;

  void require(bool condition, const std::string& what) {
    if (condition) return;
    pass = false;
    if (std::find(failures.begin(), failures.end(), what) == failures.end()) failures.push_back(what);
  }
};

oracle::GenWord gen_word(const Automorphism& g) {
  oracle::GenWord w;
  for (auto s : g.word()) w.push_back({s.atom(), s.inverted()});
  return w;
}

std::uint64_t power_of(unsigned d, std::size_t k) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n *= d;
  return n;
}

// 1. Grigorchuk fix measures, against a hand-solved 3x3 system and level counts to k = 20.
void fix_measures(Verdict& v) {
  auto start = std::chrono::steady_clock::now();
  auto g = load("grigorchuk").group;
  std::vector<Rational> got;
  for (const char* w : {"a", "b", "c", "d", "e"}) got.push_back(fix_measure(parse_word(g, w)));
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<Rational> expect{0, Rational(1, 7), Rational(2, 7), Rational(4, 7), 1};
  v.require(got == expect, "values differ from 0, 1/7, 2/7, 4/7, 1");

  Rational half(1, 2);
  auto solved = oracle::solve({{1, -half, 0}, {0, 1, -half}, {-half, 0, 1}}, {0, 0, half});
  v.require(solved[0] == got[1] && solved[1] == got[2] && solved[2] == got[3], "3x3 system disagrees");

  auto counts = oracle::grigorchuk_counts(20);
  for (int s = 0; s < 4; ++s) {
    Integer scale = 1;
    for (std::size_t k = 0; k <= 20; ++k) {
      v.require(Rational(counts.interior[s][k], scale) <= got[s] && got[s] <= Rational(counts.fixed[s][k], scale),
                "level " + std::to_string(k) + " bracket misses the value");
      scale *= 2;
    }
  }
  v.require(seconds < 1.0, "took " + std::to_string(seconds) + " s");
  v.note << "a..e = 0, 1/7, 2/7, 4/7, 1 in " << static_cast<long>(seconds * 1e6) << " us; brackets hold for k <= 20";
}

// 2. Subset lemma up to n = 6.
void lemma(Verdict& v) {
  auto report = lemma_subsets_verify(6);
  v.require(report.counterexamples.empty(), std::to_string(report.counterexamples.size()) + " counterexamples");
  v.require(report.levels.size() == 6, "levels missing");
  std::size_t transitive = 0;
  for (const auto& level : report.levels) transitive += level.transitive_subgroups;
  v.note << report.counterexamples.size() << " counterexamples over " << transitive
         << " transitive subgroups";
}

// 3. Absolute approximation of X_0 to 1/8.
void anf(Verdict& v) {
  auto g = load("grigorchuk").group;
  Vertex x0 = Vertex::parse("0", 2);
  auto result = anf_construct(g, {x0}, Rational(1, 8));
  v.require(result.status == AnfStatus::achieved, "not achieved");
  v.require(result.verified, "library re-verification failed");
  v.require(result.defect <= Rational(1, 14), "defect " + to_string(result.defect));
  // Independent re-check: support inside X_0 and the defect from a fresh measure.
  v.require(support_inside(result.element, {x0}, 14), "support leaves X_0 at depth 14");
  oracle::TreeOracle tree(g);
  v.require(tree.fixes_subtree(gen_word(result.element), Vertex::parse("1", 2), 14), "oracle sees motion under 1");
  v.require(result.defect == Rational(1, 2) - (1 - fix_measure(result.element)), "defect does not recompute");
  for (const auto& round : result.rounds)
    if (round.bound_met) v.require(round.decay_ok, "decay bound fails in a round that meets the bound");
  v.note << "element " << result.element.to_string() << ", defect " << to_string(result.defect)
         << ", " << result.rounds.size() << " round(s)";
}

// 4. Total non-freeness certificates.
void tnf(Verdict& v) {
  auto g = load("grigorchuk").group;
  auto one = tnf_certificate(g, 1, 1);
  v.require(one.achieved && one.minimal_radius == 1u, "level 1 not certified at radius 1");
  v.require(!one.entries.empty() && one.entries[0].element.to_string() == "d", "level 1 certificate is not d");
  v.require(validate_tnf(one), "level 1 certificate does not validate");
  v.note << "k=1 r=1 (d)";
  for (std::size_t k : {2u, 3u}) {
    auto cert = tnf_certificate(g, k, 6);
    if (cert.achieved) {
      v.require(validate_tnf(cert), "level " + std::to_string(k) + " certificate does not validate");
      v.note << ", k=" << k << " r=" << *cert.minimal_radius;
    } else {
      v.require(false, "level " + std::to_string(k) + " not separated within radius 6");
      auto wider = tnf_certificate(g, k, 8);
      v.note << ", k=" << k << " unseparated at r<=6 (" << cert.atoms << " of " << power_of(2, k) << " classes)";
      if (wider.achieved) v.note << ", minimal radius " << *wider.minimal_radius;
    }
  }
  auto odometer = load("binary-odometer").group;
  for (std::size_t k = 1; k <= 4; ++k) v.require(!tnf_certificate(odometer, k, 8).achieved, "odometer certified");
  v.note << "; odometer uncertified for k <= 4, r <= 8";
}

// 5. Orbits on pairs and tower consistency.
void orbits_and_tower(Verdict& v) {
  auto g = load("grigorchuk").group;
  auto pairs = orbits(g, 2, 2);
  std::vector<std::size_t> sizes;
  for (const auto& o : pairs.orbits) sizes.push_back(o.size());
  v.require(sizes == std::vector<std::size_t>{2, 4}, "orbit sizes differ from {2, 4}");
  auto brute = oracle::tuple_orbits(oracle::TreeOracle(g), 2, 2);
  std::vector<std::size_t> brute_sizes;
  for (const auto& o : brute) brute_sizes.push_back(o.size());
  v.require(brute_sizes == sizes, "oracle orbit sizes differ");

  std::size_t towers = 0;
  for (const char* name : {"grigorchuk", "binary-odometer", "gupta-sidki-3"}) {
    auto group = load(name).group;
    std::size_t max_level = group->degree() == 2 ? 5 : 4;
    for (std::size_t n = 1; n <= 3; ++n) {
      auto tower = component_tower(group, n, max_level);
      v.require(tower.consistent, std::string(name) + " tower inconsistent for n = " + std::to_string(n));
      for (std::size_t i = 1; i < tower.levels.size(); ++i) {
        std::vector<Rational> collected(tower.levels[i - 1].nodes.size());
        for (const auto& node : tower.levels[i].nodes)
          if (node.parent) collected[*node.parent] += node.weight;
        for (std::size_t j = 0; j < collected.size(); ++j)
          v.require(collected[j] == tower.levels[i - 1].nodes[j].weight, std::string(name) + " parent weight mismatch");
      }
      ++towers;
    }
  }
  v.note << "orbit sizes 2, 4 (oracle agrees); " << towers << " towers consistent";
}

// mu^2 of ordered pairs in distinct level-k cylinders inside Fix(g)^2, pair by pair.
Rational distinct_pair_mass(const Automorphism& g, std::size_t k) {
  unsigned d = g.group()->degree();
  std::uint64_t count = power_of(d, k);
  std::vector<Rational> m(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Vertex u = Vertex::from_index(i, k, d);
    m[i] = apply(g, u) == u ? fix_measure(section(g, u)) / Rational(count) : Rational(0);
  }
  Rational total = 0;
  for (std::uint64_t i = 0; i < count; ++i)
    for (std::uint64_t j = 0; j < count; ++j)
      if (i != j) total += m[i] * m[j];
  return total;
}

// 6. Weighted character sums bracket the exact mass for catalog elements.
void sum_rule(Verdict& v) {
  struct Case {
    GroupPtr group;
    std::size_t radius;
    std::size_t max_level;
  };
  std::vector<Case> cases{{load("grigorchuk").group, 3, 6},
                          {load("binary-odometer").group, 3, 6},
                          {load("trivial").group, 0, 6},
                          {switch_group(3), 2, 6},
                          {load("gupta-sidki-3").group, 2, 3}};
  std::size_t checks = 0;
  for (const auto& c : cases) {
    std::vector<Automorphism> elements;
    for_each_ball_word(*c.group, c.radius, [&](const Word& w) {
      elements.emplace_back(c.group, w);
      return false;
    });
    for (std::size_t level = 1; level <= c.max_level; ++level) {
      auto partition = orbits(c.group, 2, level);
      for (const auto& g : elements) {
        Rational exact = distinct_pair_mass(g, level);
        for (std::size_t depth = level; depth <= 6; ++depth) {
          auto intervals = char_intervals(partition, g, depth);
          Rational lower = 0, upper = 0;
          for (std::size_t o = 0; o < intervals.size(); ++o) {
            lower += orbit_weight(partition, o) * intervals[o].lower;
            upper += orbit_weight(partition, o) * intervals[o].upper;
          }
          bool holds = lower <= exact && exact <= upper;
          if (!holds) {
            v.require(false, g.to_string() + " at level " + std::to_string(level) + ", depth " + std::to_string(depth));
          }
          ++checks;
        }
        auto library = char_sum_check(c.group, 2, g, level, 6);
        v.require(library.exact == exact && library.holds, "char_sum_check disagrees for " + g.to_string());
      }
    }
  }
  v.note << checks << " (element, level, depth) brackets hold";
}

// 7. The n = 1 component is separated from every n = 2 component.
void distinctness(Verdict& v) {
  auto g = load("grigorchuk").group;
  std::size_t separated = 0;
  for (std::size_t level = 1; level <= 3; ++level) {
    auto report = distinctness_search(g, 2, level, 8, 4);
    for (const auto& pair : report.pairs) {
      bool mixed = report.components[pair.first].n != report.components[pair.second].n;
      if (!mixed) continue;
      bool ok = pair.witness && pair.witness->word().size() <= 4 &&
                (pair.first_interval.upper < pair.second_interval.lower ||
                 pair.second_interval.upper < pair.first_interval.lower);
      v.require(ok, "level " + std::to_string(level) + " pair unseparated");
      separated += ok;
    }
  }
  v.note << separated << " (n=1, n=2) pairs separated over levels 1..3, words of length <= 4";
}

// 8. Switch group invariant on pairs.
void switch_invariant(Verdict& v) {
  for (std::size_t j = 1; j <= 3; ++j) {
    auto report = r_invariance_check(j, 2);
    std::string tag = "j=" + std::to_string(j) + ": ";
    v.require(report.invariant, tag + "r not invariant");
    v.require(report.constant_on_orbits, tag + "r not constant on orbits");
    v.require(report.class_masses.size() == (1u << j), tag + "wrong class count");
    for (const auto& [r, mass] : report.class_masses) v.require(mass == Rational(1, 1 << j), tag + "class mass");

    // Oracle: orbits by closure under the generators, class masses by direct counting.
    auto group = switch_group(static_cast<unsigned>(2 * j));
    std::size_t level = 2 * j;
    for (const auto& orbit : oracle::tuple_orbits(oracle::TreeOracle(group), 2, level)) {
      auto r = r_invariant(orbit.front());
      for (const auto& t : orbit) v.require(r_invariant(t) == r, tag + "oracle orbit with two r values");
    }
    std::uint64_t count = power_of(2, level);
    std::map<std::vector<std::uint8_t>, std::uint64_t> classes;
    for (std::uint64_t a = 0; a < count; ++a)
      for (std::uint64_t b = 0; b < count; ++b)
        ++classes[r_invariant({Vertex::from_index(a, level, 2), Vertex::from_index(b, level, 2)})];
    for (const auto& [r, n] : classes)
      v.require(Rational(n, count * count) == report.class_masses[r], tag + "direct class mass differs");
  }
  v.note << "j = 1..3: invariant, 2^j classes of mass 2^-j";
}

// 9. Trace property and positive semidefinite Gram matrices.
void characters(Verdict& v) {
  auto g = load("grigorchuk").group;
  std::mt19937_64 rng(0xace09);
  for (int t = 0; t < 100; ++t) {
    auto a = oracle::to_element(g, oracle::random_word(g, 8, rng));
    auto b = oracle::to_element(g, oracle::random_word(g, 8, rng));
    v.require(fix_measure(compose(a, b)) == fix_measure(compose(b, a)), "fix(gh) != fix(hg) for " + a.to_string() + ", " + b.to_string());
  }
  std::vector<Automorphism> ball;
  for_each_ball_word(*g, 6, [&](const Word& w) {
    ball.emplace_back(g, w);
    return false;
  });
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<Automorphism> set;
    for (int i = 0; i < 5; ++i) set.push_back(ball[pick(rng)]);
    auto report = gram_psd_check(set);
    v.require(report.positive_semidefinite, "Gram matrix not PSD");
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        v.require(report.gram[i][j] == fix_measure(compose(set[i], inverse(set[j]))), "Gram entry differs");
  }
  v.note << "100 pairs, 20 Gram matrices from a ball of " << ball.size() << " words";
}

// 10. Structural property suite.
void structure(Verdict& v) {
  std::pair<const char*, properties::Outcome> runs[] = {
      {"group laws", properties::group_laws(0x5eed0001, 25)},
      {"cocycle", properties::cocycle(0x5eed0002, 40)},
      {"m_k monotone", properties::level_monotone(0x5eed0003, 20)},
      {"portraits", properties::portrait_consistency(0x5eed0004, 30)},
      {"dsl round trip", properties::dsl_round_trip(0x5eed0005, 60)},
  };
  std::size_t cases = 0;
  for (auto& [name, out] : runs) {
    v.require(out.ok, std::string(name) + ": " + out.detail);
    cases += out.cases;
  }
  v.note << cases << " seeded cases over 5 properties";
}

}  // namespace

int main() {
  std::pair<const char*, std::function<void(Verdict&)>> criteria[] = {
      {"grigorchuk fix measures", fix_measures},
      {"subset lemma n <= 6", lemma},
      {"absolute approximation of X_0", anf},
      {"total non-freeness certificates", tnf},
      {"pair orbits and component towers", orbits_and_tower},
      {"character sum rule", sum_rule},
      {"component distinctness", distinctness},
      {"switch group invariant", switch_invariant},
      {"trace property and Gram PSD", characters},
      {"structural properties", structure},
  };
  int failures = 0;
  int index = 0;
  for (auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    auto start = std::chrono::steady_clock::now();
    try {
      check(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << index << "] " << name << ": " << v.note.str();
    for (std::size_t i = 0; i < v.failures.size(); ++i) std::cout << (i ? "; " : " | failed: ") << v.failures[i];
    std::cout << " (" << static_cast<long>(seconds * 1000) << " ms)" << std::endl;
  }
  return failures;
}
