#pragma once

#include "branchlab/tree.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace branchlab {

struct CatalogEntry {
  std::string name;
  GroupPtr group;
  bool level_transitive = false;
  // Deepest level at which a nontrivial rigid stabilizer element is expected near the root
  // (evidence only); 0 when the group has no nontrivial rigid stabilizers.
  std::size_t weakly_branch_evidence_depth = 0;
  // Words that are trivial in the group; checked with is_trivial when the entry is built.
  std::vector<std::string> relations;
};

// Names accepted by load(); "switch-group(L)" stands for the parametrised family.
std::vector<std::string> catalog_names();

// grigorchuk, gupta-sidki-3, binary-odometer, trivial, switch-group(L) (or switch-group:L).
// Throws std::invalid_argument for unknown names or a bad truncation level.
CatalogEntry load(std::string_view name);

// Generators of the switch group truncated at level L: sigma_v ("s" + v) for |v| even,
// h_l ("h" + l) for l odd, all levels <= L. Every generator is finitary.
GroupPtr switch_group(unsigned truncation);

// Symbols used for word enumeration: generators in definition order, each followed by its
// inverse unless it is an involution; identity generators are skipped.
std::vector<Symbol> ball_alphabet(const GroupDef& group);

// Visits reduced words of length <= radius in shortlex order (the empty word first).
// Stops early when the visitor returns true; returns whether it stopped early.
bool for_each_ball_word(const GroupDef& group, std::size_t radius,
                        const std::function<bool(const Word&)>& visit);

// Images of all level-k vertices (indexed in base d, first letter most significant).
std::vector<std::uint32_t> level_action(WordEngine& engine, const Word& w, std::size_t k);

struct TransitivityReport {
  bool transitive = false;
  std::size_t orbit_count = 0;
};
TransitivityReport check_level_transitive(const GroupDef& group, std::size_t k);

// True when w acts trivially outside the subtree below v (w may still be trivial).
bool supported_in(WordEngine& engine, const Word& w, const Vertex& v, std::size_t budget = kDefaultBudget);

// First nontrivial ball element (shortlex) whose support lies in the cylinder of v.
std::optional<Automorphism> rist_witness(const GroupPtr& group, const Vertex& v, std::size_t radius,
                                         std::size_t budget = kDefaultBudget);

}  // namespace branchlab
