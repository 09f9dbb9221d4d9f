#pragma once

// Exact measures of fixed-point sets on the boundary with the uniform Bernoulli measure.

#include "branchlab/rational.hpp"
#include "branchlab/tree.hpp"

#include <vector>

namespace branchlab {

// Exact value in [0, 1].
using MeasureValue = Rational;

enum class FixStateKind { trivial, transient, doomed };

// Substochastic recursion behind Fix(g) = union over fixed letters x of x.Fix(g_x), on the
// states of the minimal automaton of g.
struct FixSystem {
  MinimalAutomaton automaton;
  // transition[s][t] = #{x : s fixes x and s_x = t} / d
  std::vector<std::vector<Rational>> transition;
  std::vector<FixStateKind> kinds;
  std::vector<MeasureValue> solution;
};

FixSystem build_fix_system(const MinimalAutomaton& automaton);

MeasureValue fix_measure(WordEngine& engine, const Word& w, std::size_t budget = kDefaultBudget);
MeasureValue fix_measure(const Automorphism& g, std::size_t budget = kDefaultBudget);
MeasureValue supp_measure(const Automorphism& g, std::size_t budget = kDefaultBudget);

// Fraction of level-k vertices fixed by g. Needs no closure budget.
MeasureValue fix_measure_level(const Automorphism& g, std::size_t k);

// Level-k vertices fixed by g at which the section of g is trivial, in shortlex order.
std::vector<Vertex> fix_interior(const Automorphism& g, std::size_t k, std::size_t budget = kDefaultBudget);

// Per-level counts, index 0..max_level: vertices fixed by g, and those in the fix interior.
struct LevelCounts {
  std::vector<Integer> fixed;
  std::vector<Integer> interior;
};
LevelCounts level_counts(WordEngine& engine, const Word& w, std::size_t max_level, std::size_t budget,
                         bool with_interior = true);

// Certified bracket lower <= mu(Fix(g)) <= upper obtained at one level.
struct LevelBound {
  std::size_t level = 0;
  MeasureValue lower;
  MeasureValue upper;
};
std::vector<LevelBound> level_bounds(const Automorphism& g, std::size_t max_level,
                                     std::size_t budget = kDefaultBudget);

// Character value chi(g) = mu(Fix(g)).
inline MeasureValue char_value(const Automorphism& g, std::size_t budget = kDefaultBudget) {
  return fix_measure(g, budget);
}

// Exact test for symmetric positive semidefiniteness (Schur complements, zero pivots
// require zero rows).
bool is_positive_semidefinite(std::vector<std::vector<Rational>> matrix);

struct GramReport {
  std::vector<std::vector<Rational>> gram;  // gram[i][j] = chi(g_i g_j^-1)
  bool positive_semidefinite = false;
};
GramReport gram_psd_check(const std::vector<Automorphism>& elements, std::size_t budget = kDefaultBudget);

}  // namespace branchlab
