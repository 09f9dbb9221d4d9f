#pragma once

// Automorphisms of the d-regular rooted tree.
//
// Every element lives over a GroupDef. Internally an element is a freely reduced
// word over "atoms": each atom has a root permutation and one section word per
// letter (wreath recursion). Named generators are atoms; portrait-defined
// generators and explicitly built nodes are expanded into derived atoms.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace branchlab {

using Letter = std::uint8_t;

inline constexpr std::size_t kDefaultBudget = 1'000'000;
inline constexpr unsigned kMaxDegree = 36;

// Raised when a closure or enumeration outgrows its budget. The question asked has no answer.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::size_t budget)
      : std::runtime_error("budget of " + std::to_string(budget) + " exceeded"),
        budget_(budget) {}
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

// A generator name that does not resolve in the ambient group.
class ResolveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Alphabet {
 public:
  explicit Alphabet(unsigned size);
  unsigned size() const { return size_; }

 private:
  unsigned size_;
};

// Finite word over the alphabet; the empty word is the root. Ordered shortlex.
class Vertex {
 public:
  Vertex() = default;
  explicit Vertex(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  // Letters are written as base-36 digits ("0".."9", "a".."z"); "" is the root.
  static Vertex parse(std::string_view text, unsigned degree);
  // Level-`level` vertex whose base-d expansion (first letter most significant) is `index`.
  static Vertex from_index(std::uint64_t index, std::size_t level, unsigned degree);

  std::size_t level() const { return letters_.size(); }
  bool is_root() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }

  std::uint64_t index(unsigned degree) const;
  Vertex prefix(std::size_t length) const;
  Vertex child(Letter x) const;
  bool has_prefix(const Vertex& other) const;
  std::string to_string() const;

  bool operator==(const Vertex&) const = default;
  std::strong_ordering operator<=>(const Vertex& other) const;

 private:
  std::vector<Letter> letters_;
};

class Permutation {
 public:
  Permutation() = default;
  static Permutation identity(unsigned degree);
  // Throws std::invalid_argument unless `images` is a bijection of 0..d-1.
  static Permutation from_images(std::vector<Letter> images);
  // Disjoint cycles; throws on repeated or out-of-range letters.
  static Permutation from_cycles(unsigned degree, const std::vector<std::vector<Letter>>& cycles);

  unsigned degree() const { return static_cast<unsigned>(images_.size()); }
  Letter operator()(Letter x) const { return images_[x]; }
  const std::vector<Letter>& images() const { return images_; }
  bool is_identity() const;

  Permutation inverse() const;
  // (p * q)(x) = p(q(x))
  Permutation operator*(const Permutation& rhs) const;

  std::vector<std::vector<Letter>> cycles() const;
  // "(0 1)(2 3)" style; "()" for the identity.
  std::string cycle_string() const;

  bool operator==(const Permutation&) const = default;
  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<Letter> images_;
};

// A letter of an atom word: atom index plus an inversion flag packed in one code.
class Symbol {
 public:
  constexpr Symbol() = default;
  constexpr Symbol(std::uint32_t atom, bool inverted) : code_((atom << 1) | (inverted ? 1u : 0u)) {}

  constexpr std::uint32_t atom() const { return code_ >> 1; }
  constexpr bool inverted() const { return (code_ & 1u) != 0; }
  constexpr Symbol inverse() const { return from_code(code_ ^ 1u); }
  constexpr std::uint32_t code() const { return code_; }
  static constexpr Symbol from_code(std::uint32_t code) {
    Symbol s;
    s.code_ = code;
    return s;
  }

  constexpr bool operator==(const Symbol&) const = default;
  constexpr auto operator<=>(const Symbol&) const = default;

 private:
  std::uint32_t code_ = 0;
};

// Product s1 s2 ... sm acting right to left: apply(w, v) = s1(s2(...sm(v))).
using Word = std::vector<Symbol>;

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

struct Atom {
  std::string name;
  Permutation perm;
  Permutation perm_inverse;
  std::vector<Word> sections;
  std::vector<Word> inverse_sections;
  bool identity = false;
  bool involution = false;
};

using AtomTable = std::vector<Atom>;

// A word whose symbols are generator names, used by the group-definition DSL and the catalog.
struct NamedSymbol {
  std::string name;
  bool inverse = false;
  bool operator==(const NamedSymbol&) const = default;
};
using NamedWord = std::vector<NamedSymbol>;

struct RecursionBody {
  Permutation perm;
  std::vector<NamedWord> sections;
};

// Finitary generator: nontrivial vertex permutations, identity elsewhere.
struct PortraitBody {
  std::map<Vertex, Permutation> entries;
};

struct GeneratorDef {
  std::string name;
  std::variant<RecursionBody, PortraitBody> body;
};

struct GroupMetadata {
  std::string catalog_name;
  std::optional<bool> level_transitive;
};

class GroupDef;
using GroupPtr = std::shared_ptr<const GroupDef>;

class GroupDef {
 public:
  // Validates the generator bodies (unique names, resolvable sections, d sections per body,
  // portrait vertices inside the alphabet) and expands them into atoms.
  static GroupPtr create(unsigned degree, std::vector<GeneratorDef> generators,
                         GroupMetadata metadata = {});

  unsigned degree() const { return alphabet_.size(); }
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<GeneratorDef>& generators() const { return generators_; }
  const GroupMetadata& metadata() const { return metadata_; }
  std::optional<std::size_t> generator_index(std::string_view name) const;

  // Immutable snapshot of the atom table; later interning never alters existing entries.
  std::shared_ptr<const AtomTable> atoms() const;

  // Interns a derived atom with the given root permutation and section words.
  Symbol intern_node(const Permutation& perm, const std::vector<Word>& sections) const;
  // Interns the atoms of a finitary portrait (map of vertex permutations) and returns its word.
  Word intern_portrait(const std::map<Vertex, Permutation>& entries) const;

  GroupDef(unsigned degree, std::vector<GeneratorDef> generators, GroupMetadata metadata);

 private:
  struct PendingAtom {
    std::string name;
    Permutation perm;
    std::vector<Word> sections;
  };
  // Appends atoms, derives their inverse sections and identity/involution flags. Caller holds mutex_.
  void commit_locked(std::vector<PendingAtom> pending) const;
  Word intern_portrait_locked(const std::map<Vertex, Permutation>& entries, const Vertex& base,
                              std::vector<PendingAtom>& pending) const;

  Alphabet alphabet_;
  std::vector<GeneratorDef> generators_;
  GroupMetadata metadata_;

  mutable std::mutex mutex_;
  mutable std::shared_ptr<const AtomTable> atoms_;
  mutable std::map<std::string, std::uint32_t> interned_;
};

// Word arithmetic over a fixed atom snapshot, with a thread-confined triviality memo.
class WordEngine {
 public:
  explicit WordEngine(const GroupDef& group);
  explicit WordEngine(std::shared_ptr<const AtomTable> atoms, unsigned degree);

  unsigned degree() const { return degree_; }
  const AtomTable& atoms() const { return *atoms_; }

  // Drops identity atoms, folds involution inverses and cancels adjacent inverse pairs.
  Word reduce(const Word& w) const;
  Word multiply(const Word& lhs, const Word& rhs) const;
  Word inverse(const Word& w) const;

  Letter image(const Word& w, Letter x) const;
  Permutation permutation(const Word& w) const;
  Word section(const Word& w, Letter x) const;
  Word section(const Word& w, const Vertex& v) const;
  Vertex apply(const Word& w, const Vertex& v) const;

  // Breadth-first closure over sections; false on the first nontrivial root permutation.
  bool is_trivial(const Word& w, std::size_t budget = kDefaultBudget);

 private:
  std::shared_ptr<const AtomTable> atoms_;
  unsigned degree_;
  std::unordered_map<Word, bool, WordHash> trivial_memo_;
};

class Portrait {
 public:
  Portrait(unsigned degree, std::size_t depth, std::map<Vertex, Permutation> entries = {});

  unsigned degree() const { return degree_; }
  std::size_t depth() const { return depth_; }
  const std::map<Vertex, Permutation>& entries() const { return entries_; }
  Permutation at(const Vertex& v) const;
  Vertex apply(const Vertex& v) const;
  bool is_trivial() const { return entries_.empty(); }

  bool operator==(const Portrait&) const = default;

 private:
  unsigned degree_;
  std::size_t depth_;
  std::map<Vertex, Permutation> entries_;
};

class Automorphism {
 public:
  Automorphism(GroupPtr group, Word word);

  static Automorphism identity(GroupPtr group);
  static Automorphism generator(GroupPtr group, std::string_view name);
  // Wreath-recursion form: root permutation plus one section per letter (same group).
  static Automorphism node(const Permutation& perm, const std::vector<Automorphism>& sections);
  static Automorphism from_portrait(GroupPtr group, const Portrait& portrait);

  const GroupPtr& group() const { return group_; }
  const Word& word() const { return word_; }
  bool is_identity_word() const { return word_.empty(); }

  // Generator names joined by '*', "^-1" for inverses, "e" for the empty word.
  std::string to_string() const;

  bool operator==(const Automorphism& other) const = delete;  // use branchlab::equal

 private:
  GroupPtr group_;
  Word word_;
};

Vertex apply(const Automorphism& g, const Vertex& v);
Permutation root_permutation(const Automorphism& g);
Automorphism section(const Automorphism& g, const Vertex& v);
Automorphism compose(const Automorphism& g, const Automorphism& h);
Automorphism inverse(const Automorphism& g);
bool is_trivial(const Automorphism& g, std::size_t budget = kDefaultBudget);
bool equal(const Automorphism& g, const Automorphism& h, std::size_t budget = kDefaultBudget);
Portrait portrait(const Automorphism& g, std::size_t depth);

struct AutomatonState {
  Permutation perm;
  std::vector<std::size_t> next;
};

// Minimal Mealy machine of an element; state 0 is the element itself and states are
// numbered in breadth-first order by letter, which makes the machine canonical.
class MinimalAutomaton {
 public:
  MinimalAutomaton(unsigned degree, std::vector<AutomatonState> states);

  unsigned degree() const { return degree_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<AutomatonState>& states() const { return states_; }
  std::optional<std::size_t> identity_state() const;

  // One line per state: "q<i> [images] q<child> ...".
  std::string serialize() const;

 private:
  unsigned degree_;
  std::vector<AutomatonState> states_;
};

// Section closure of a word: reachable reduced words with their per-letter successors.
struct Closure {
  std::vector<Word> states;
  std::vector<std::vector<std::size_t>> next;
};
Closure section_closure(WordEngine& engine, const Word& start, std::size_t budget);

MinimalAutomaton minimize(WordEngine& engine, const Word& w, std::size_t budget = kDefaultBudget);
MinimalAutomaton minimize(const Automorphism& g, std::size_t budget = kDefaultBudget);

}  // namespace branchlab
