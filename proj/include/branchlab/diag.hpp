#pragma once

// Diagonal actions on unordered n-tuples of distinct level-k vertices: orbits, the
// component tower across levels, character intervals and the switch-group invariant.

#include "branchlab/rational.hpp"
#include "branchlab/tree.hpp"

#include <map>
#include <optional>
#include <vector>

namespace branchlab {

// Sorted level-k vertex indices (base d, first letter most significant), pairwise distinct.
using TupleClass = std::vector<std::uint32_t>;

std::string tuple_string(const TupleClass& t, std::size_t level, unsigned degree);

struct OrbitPartition {
  GroupPtr group;
  std::size_t level = 0;
  std::size_t n = 0;
  std::vector<TupleClass> tuples;                // lexicographic order
  std::vector<std::size_t> orbit_of;             // tuple index -> orbit id
  std::vector<std::vector<std::size_t>> orbits;  // ascending tuple indices; ids ordered by least member

  unsigned degree() const { return group->degree(); }
  // Index of a sorted distinct tuple in `tuples`.
  std::size_t index_of(const TupleClass& t) const;
  const TupleClass& representative(std::size_t orbit) const { return tuples[orbits[orbit].front()]; }
};

// Throws BudgetExceeded when the number of tuple classes exceeds `budget`.
OrbitPartition orbits(const GroupPtr& group, std::size_t n, std::size_t level, std::size_t budget = kDefaultBudget);

// Mass of the ordered tuples lying over an orbit: |orbit| * n! / d^(k n).
Rational orbit_weight(const OrbitPartition& partition, std::size_t orbit);

struct ComponentNode {
  std::size_t level = 0;
  std::size_t orbit = 0;
  // Orbit at the previous level containing the truncated tuples; empty when truncation
  // makes two coordinates collide (or at the first level).
  std::optional<std::size_t> parent;
  std::size_t size = 0;
  Rational weight;
};

struct TowerLevel {
  OrbitPartition partition;
  std::vector<ComponentNode> nodes;
  Rational total_weight;   // (d^k)_n / d^(k n)
  Rational excluded_mass;  // ordered tuples with two coordinates in one level-k cylinder
};

struct ComponentTower {
  std::size_t n = 0;
  std::vector<TowerLevel> levels;
  // Truncation maps each orbit into one parent orbit, parent weight = sum of child weights,
  // and counts never decrease.
  bool consistent = false;
};

// Levels from the least k >= 1 with d^k >= n up to max_level.
ComponentTower component_tower(const GroupPtr& group, std::size_t n, std::size_t max_level,
                               std::size_t budget = kDefaultBudget);

struct CharacterInterval {
  Rational lower;
  Rational upper;
};

// Fractions of depth-`depth` descendants of each level-k vertex that lie in Fix(g)
// (upper) or in its interior (lower).
struct VertexFractions {
  std::vector<Rational> fixed;
  std::vector<Rational> interior;
};
VertexFractions vertex_fractions(const Automorphism& g, std::size_t level, std::size_t depth,
                                 std::size_t budget = kDefaultBudget);

CharacterInterval char_interval(const OrbitPartition& partition, std::size_t orbit, const Automorphism& g,
                                std::size_t depth, std::size_t budget = kDefaultBudget);
std::vector<CharacterInterval> char_intervals(const OrbitPartition& partition, const Automorphism& g,
                                              std::size_t depth, std::size_t budget = kDefaultBudget);
std::vector<CharacterInterval> char_intervals(const OrbitPartition& partition, const VertexFractions& fractions);

struct SumCheck {
  Rational lower;  // sum over orbits of c_alpha * lower_alpha
  Rational upper;
  Rational exact;  // mu^n(Fix(g)^n) over ordered tuples in distinct level-k cylinders
  bool holds = false;
};

// Components at `level`, intervals at `depth` >= level; the exact side comes from fix_measure.
SumCheck char_sum_check(const GroupPtr& group, std::size_t n, const Automorphism& g, std::size_t level,
                        std::size_t depth, std::size_t budget = kDefaultBudget);

struct ComponentRef {
  std::size_t n = 0;
  std::size_t orbit = 0;
  TupleClass representative;
};

struct SeparationResult {
  std::size_t first = 0;  // indices into DistinctnessReport::components
  std::size_t second = 0;
  std::optional<Automorphism> witness;
  CharacterInterval first_interval;
  CharacterInterval second_interval;
};

struct DistinctnessReport {
  std::size_t level = 0;
  std::size_t depth = 0;
  std::size_t radius = 0;
  std::vector<ComponentRef> components;
  std::vector<SeparationResult> pairs;
  std::size_t unresolved = 0;
};

// Components for every n <= n_max at `level`; each pair is separated by the first ball word
// (shortlex) whose character intervals at `depth` are disjoint.
DistinctnessReport distinctness_search(const GroupPtr& group, std::size_t n_max, std::size_t level, std::size_t depth,
                                       std::size_t radius, std::size_t budget = kDefaultBudget);

struct SymmetrizationCheck {
  std::size_t lhs_size = 0;  // ordered tuples in the symmetrized product
  std::size_t rhs_size = 0;  // B^n minus the union of the B_j^n
  bool holds = false;
};

// Sets of level-k vertices, pairwise disjoint (std::invalid_argument otherwise).
SymmetrizationCheck symmetrization_identity_check(const std::vector<std::vector<Vertex>>& sets,
                                                  std::size_t budget = kDefaultBudget);

// r_i = sum over the tuple of the letter at position 2i (1-based), mod 2; all vertices on
// one even level 2j >= 2.
std::vector<std::uint8_t> r_invariant(const std::vector<Vertex>& tuple);

struct RInvarianceReport {
  std::size_t j = 0;
  std::size_t n = 0;
  std::size_t generators = 0;
  std::size_t tuples_checked = 0;
  bool invariant = false;        // r(g t) = r(t) for every generator and ordered tuple
  bool constant_on_orbits = false;
  std::size_t orbit_count = 0;
  std::map<std::vector<std::uint8_t>, Rational> class_masses;  // over all ordered tuples
};

// Switch group truncated at level 2j acting on level 2j; n must be even.
RInvarianceReport r_invariance_check(std::size_t j, std::size_t n, std::size_t budget = kDefaultBudget);

}  // namespace branchlab
