#pragma once

// Finite certificates for the non-freeness hierarchy: fix-interior separation of a
// level (total non-freeness), greedy approximation of clopen sets by supports
// (absolute non-freeness), and the subset lemma for transitive permutation groups.

#include "branchlab/measure.hpp"
#include "branchlab/tree.hpp"

#include <optional>
#include <vector>

namespace branchlab {

struct TnfEntry {
  Automorphism element;
  std::vector<Vertex> interior;  // fix_interior(element, level)
};

struct TnfCertificate {
  bool achieved = false;
  unsigned degree = 2;
  std::size_t level = 0;
  std::size_t radius_searched = 0;
  // Length of the word that completed the separation (minimal radius); set when achieved.
  std::optional<std::size_t> minimal_radius;
  std::size_t words_examined = 0;
  // Elements whose interiors refined the partition of V_k, in discovery order.
  std::vector<TnfEntry> entries;
  // Atoms of the Boolean algebra generated so far (number of classes of V_k).
  std::size_t atoms = 0;
};

// Searches the ball of radius max_radius in shortlex order, refining the partition of V_k
// by fix-interior sets until every vertex is separated.
TnfCertificate tnf_certificate(const GroupPtr& group, std::size_t level, std::size_t max_radius,
                               std::size_t budget = kDefaultBudget);

// Recomputes every interior and the generated partition from scratch.
bool validate_tnf(const TnfCertificate& certificate, std::size_t budget = kDefaultBudget);

struct SupportCandidate {
  Automorphism element;
  MeasureValue support;
  // support >= mu(X_v) / d
  bool meets_bound = false;
};

// Ball element with support inside X_v maximizing the support measure (shortlex tie break).
std::optional<SupportCandidate> support_search(const GroupPtr& group, const Vertex& v, std::size_t radius,
                                               std::size_t budget = kDefaultBudget);

enum class AnfStatus { achieved, stalled, round_limit };

struct AnfRound {
  std::size_t depth = 0;               // cover depth used in this round
  std::vector<Vertex> cylinders;       // maximal cylinders of A inside the fix interior
  MeasureValue cover;                  // their total mass
  std::vector<MeasureValue> supports;  // support of the element found for each cylinder
  MeasureValue defect_before;
  MeasureValue defect_after;
  bool bound_met = false;  // full cover target and every support >= mu(X_u)/d
  bool decay_ok = false;   // defect_after <= d/(d+1) * defect_before
};

struct AnfApproximation {
  AnfStatus status = AnfStatus::achieved;
  std::vector<Vertex> target;  // A as a sorted list of cylinders without redundancy
  MeasureValue target_mass;
  MeasureValue epsilon;
  Automorphism element;
  MeasureValue defect;  // mu(A \ supp(element))
  std::vector<AnfRound> rounds{};
  std::optional<Vertex> stalled_cylinder{};
  // Independent re-check: supp(element) inside A at the certificate depth and the defect
  // recomputed from a fresh measure computation.
  std::size_t certificate_depth = 0;
  bool verified = false;
};

struct AnfOptions {
  std::size_t radius = 4;
  std::size_t max_rounds = 8;
  std::size_t extra_depth = 10;  // cover depth may grow this far past the depth of A
  std::size_t max_cylinders = 4096;
  std::size_t budget = kDefaultBudget;
};

AnfApproximation anf_construct(const GroupPtr& group, const std::vector<Vertex>& target, const Rational& epsilon,
                               const AnfOptions& options = {});

// supp(g) inside the union of the cylinders in `target`, decided exactly at `depth`
// (which must be at least the deepest cylinder level).
bool support_inside(const Automorphism& g, const std::vector<Vertex>& target, std::size_t depth,
                    std::size_t budget = kDefaultBudget);

struct LemmaCounterexample {
  unsigned n = 0;
  std::vector<std::vector<unsigned>> generators;  // images of the generators of H, 0-based
  std::vector<unsigned> subset;                   // A, 0-based
};

struct LemmaLevelStats {
  unsigned n = 0;
  std::size_t subgroups = 0;
  std::size_t transitive_subgroups = 0;
  std::size_t subsets_checked = 0;
  std::size_t hypothesis_holds = 0;
};

struct LemmaReport {
  unsigned n_max = 0;
  std::vector<LemmaLevelStats> levels;
  std::vector<LemmaCounterexample> counterexamples;
};

// For every n <= n_max, every transitive H <= Sym(n) and every nonempty A in {0..n-1}:
// if |gA delta hA| <= |A| for all g, h in H then |A| > n/2. All subgroups are enumerated.
LemmaReport lemma_subsets_verify(unsigned n_max);

}  // namespace branchlab
