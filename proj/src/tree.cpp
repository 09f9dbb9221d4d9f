#include "branchlab/tree.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace branchlab {

// ---------------------------------------------------------------- alphabet, vertices

Alphabet::Alphabet(unsigned size) : size_(size) {
  if (size < 2 || size > kMaxDegree) {
    throw std::invalid_argument("alphabet size must be in [2, " + std::to_string(kMaxDegree) +
                                "], got " + std::to_string(size));
  }
}

namespace {

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  return -1;
}

char digit_char(Letter x) { return x < 10 ? static_cast<char>('0' + x) : static_cast<char>('a' + x - 10); }

}  // namespace

Vertex Vertex::parse(std::string_view text, unsigned degree) {
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char c : text) {
    int value = digit_value(c);
    if (value < 0 || static_cast<unsigned>(value) >= degree) {
      throw std::invalid_argument("letter '" + std::string(1, c) + "' out of range for alphabet size " +
                                  std::to_string(degree));
    }
    letters.push_back(static_cast<Letter>(value));
  }
  return Vertex(std::move(letters));
}

Vertex Vertex::from_index(std::uint64_t index, std::size_t level, unsigned degree) {
  std::vector<Letter> letters(level);
  for (std::size_t i = level; i-- > 0;) {
    letters[i] = static_cast<Letter>(index % degree);
    index /= degree;
  }
  return Vertex(std::move(letters));
}

std::uint64_t Vertex::index(unsigned degree) const {
  std::uint64_t value = 0;
  for (Letter x : letters_) value = value * degree + x;
  return value;
}

Vertex Vertex::prefix(std::size_t length) const {
  return Vertex(std::vector<Letter>(letters_.begin(), letters_.begin() + std::min(length, letters_.size())));
}

Vertex Vertex::child(Letter x) const {
  std::vector<Letter> letters = letters_;
  letters.push_back(x);
  return Vertex(std::move(letters));
}

bool Vertex::has_prefix(const Vertex& other) const {
  return other.level() <= level() && std::equal(other.letters_.begin(), other.letters_.end(), letters_.begin());
}

std::string Vertex::to_string() const {
  std::string out;
  out.reserve(letters_.size());
  for (Letter x : letters_) out.push_back(digit_char(x));
  return out;
}

std::strong_ordering Vertex::operator<=>(const Vertex& other) const {
  if (auto c = level() <=> other.level(); c != 0) return c;
  return letters_ <=> other.letters_;
}

// ---------------------------------------------------------------- permutations

Permutation Permutation::identity(unsigned degree) {
  Permutation p;
  p.images_.resize(degree);
  for (unsigned i = 0; i < degree; ++i) p.images_[i] = static_cast<Letter>(i);
  return p;
}

Permutation Permutation::from_images(std::vector<Letter> images) {
  std::vector<bool> seen(images.size(), false);
  for (Letter x : images) {
    if (x >= images.size()) {
      throw std::invalid_argument("letter " + std::to_string(x) + " out of range for a permutation of " +
                                  std::to_string(images.size()) + " letters");
    }
    if (seen[x]) throw std::invalid_argument("image " + std::to_string(x) + " repeated: not a permutation");
    seen[x] = true;
  }
  Permutation p;
  p.images_ = std::move(images);
  return p;
}

Permutation Permutation::from_cycles(unsigned degree, const std::vector<std::vector<Letter>>& cycles) {
  Permutation p = identity(degree);
  std::vector<bool> used(degree, false);
  for (const auto& cycle : cycles) {
    for (Letter x : cycle) {
      if (x >= degree) {
        throw std::invalid_argument("letter " + std::to_string(x) + " out of range for alphabet size " +
                                    std::to_string(degree));
      }
      if (used[x]) throw std::invalid_argument("letter " + std::to_string(x) + " repeated: not a permutation");
      used[x] = true;
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) p.images_[cycle[i]] = cycle[(i + 1) % cycle.size()];
  }
  return p;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) p.images_[images_[i]] = static_cast<Letter>(i);
  return p;
}

Permutation Permutation::operator*(const Permutation& rhs) const {
  Permutation p;
  p.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) p.images_[i] = images_[rhs.images_[i]];
  return p;
}

std::vector<std::vector<Letter>> Permutation::cycles() const {
  std::vector<std::vector<Letter>> out;
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (seen[start] || images_[start] == start) continue;
    std::vector<Letter> cycle;
    for (Letter x = static_cast<Letter>(start); !seen[x]; x = images_[x]) {
      seen[x] = true;
      cycle.push_back(x);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

std::string Permutation::cycle_string() const {
  auto cs = cycles();
  if (cs.empty()) return "()";
  std::string out;
  for (const auto& cycle : cs) {
    out += "(";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i) out += " ";
      out += std::to_string(cycle[i]);
    }
    out += ")";
  }
  return out;
}

// ---------------------------------------------------------------- words

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (Symbol s : w) {
    h ^= s.code();
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

namespace {

Word raw_inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Symbol& s : out) s = s.inverse();
  return out;
}

std::string word_key(const Word& w) {
  std::string key;
  for (Symbol s : w) key += std::to_string(s.code()) + ".";
  return key;
}

std::string node_key(const Permutation& perm, const std::vector<Word>& sections) {
  std::string key = "n:";
  for (Letter x : perm.images()) key += std::to_string(x) + ",";
  for (const Word& w : sections) key += "|" + word_key(w);
  return key;
}

constexpr std::size_t kFlagBudget = 100'000;
constexpr std::size_t kSymbolsPerState = 64;

}  // namespace

// ---------------------------------------------------------------- group definitions

GroupPtr GroupDef::create(unsigned degree, std::vector<GeneratorDef> generators, GroupMetadata metadata) {
  return std::make_shared<const GroupDef>(degree, std::move(generators), std::move(metadata));
}

GroupDef::GroupDef(unsigned degree, std::vector<GeneratorDef> generators, GroupMetadata metadata)
    : alphabet_(degree), generators_(std::move(generators)), metadata_(std::move(metadata)) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const std::string& name = generators_[i].name;
    if (name.empty()) throw std::invalid_argument("empty generator name");
    if (name == "e") throw std::invalid_argument("'e' is reserved for the identity");
    if (!index.emplace(name, i).second) throw std::invalid_argument("duplicate generator '" + name + "'");
  }
  auto resolve = [&](const NamedWord& named) {
    Word w;
    for (const auto& sym : named) {
      auto it = index.find(sym.name);
      if (it == index.end()) throw ResolveError("unknown generator '" + sym.name + "'");
      w.emplace_back(static_cast<std::uint32_t>(it->second), sym.inverse);
    }
    return w;
  };

  std::lock_guard lock(mutex_);
  atoms_ = std::make_shared<const AtomTable>();
  std::vector<PendingAtom> pending(generators_.size());
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const GeneratorDef& def = generators_[i];
    // intern_portrait_locked appends to `pending`, so fill a local atom first.
    PendingAtom atom;
    atom.name = def.name;
    if (const auto* rec = std::get_if<RecursionBody>(&def.body)) {
      if (rec->perm.degree() != degree) {
        throw std::invalid_argument("generator '" + def.name + "': permutation acts on " +
                                    std::to_string(rec->perm.degree()) + " letters, alphabet has " +
                                    std::to_string(degree));
      }
      if (rec->sections.size() != degree) {
        throw std::invalid_argument("generator '" + def.name + "': " + std::to_string(rec->sections.size()) +
                                    " sections given, alphabet size is " + std::to_string(degree));
      }
      atom.perm = rec->perm;
      for (const auto& named : rec->sections) atom.sections.push_back(resolve(named));
    } else {
      const auto& entries = std::get<PortraitBody>(def.body).entries;
      for (const auto& [v, p] : entries) {
        for (Letter x : v.letters()) {
          if (x >= degree) throw std::invalid_argument("generator '" + def.name + "': vertex letter out of range");
        }
        if (p.degree() != degree) {
          throw std::invalid_argument("generator '" + def.name + "': permutation at vertex '" + v.to_string() +
                                      "' has wrong degree");
        }
      }
      auto root = entries.find(Vertex());
      atom.perm = root == entries.end() ? Permutation::identity(degree) : root->second;
      for (unsigned x = 0; x < degree; ++x) {
        atom.sections.push_back(
            intern_portrait_locked(entries, Vertex().child(static_cast<Letter>(x)), pending));
      }
    }
    pending[i] = std::move(atom);
  }
  commit_locked(std::move(pending));
}

std::optional<std::size_t> GroupDef::generator_index(std::string_view name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].name == name) return i;
  }
  return std::nullopt;
}

std::shared_ptr<const AtomTable> GroupDef::atoms() const {
  std::lock_guard lock(mutex_);
  return atoms_;
}

Word GroupDef::intern_portrait_locked(const std::map<Vertex, Permutation>& entries, const Vertex& base,
                                      std::vector<PendingAtom>& pending) const {
  bool any = false;
  Permutation perm = Permutation::identity(degree());
  for (const auto& [v, p] : entries) {
    if (v.has_prefix(base) && !p.is_identity()) {
      any = true;
      if (v == base) perm = p;
    }
  }
  if (!any) return {};
  std::vector<Word> sections;
  for (unsigned x = 0; x < degree(); ++x) {
    sections.push_back(intern_portrait_locked(entries, base.child(static_cast<Letter>(x)), pending));
  }
  const std::string key = node_key(perm, sections);
  if (auto it = interned_.find(key); it != interned_.end()) return {Symbol(it->second, false)};
  auto index = static_cast<std::uint32_t>(atoms_->size() + pending.size());
  interned_.emplace(key, index);
  pending.push_back({"@" + std::to_string(index), perm, std::move(sections)});
  return {Symbol(index, false)};
}

void GroupDef::commit_locked(std::vector<PendingAtom> pending) const {
  auto table = std::make_shared<AtomTable>(*atoms_);
  const std::size_t first = table->size();
  for (auto& p : pending) {
    Atom atom;
    atom.name = std::move(p.name);
    atom.perm = p.perm;
    atom.perm_inverse = p.perm.inverse();
    atom.sections = std::move(p.sections);
    atom.inverse_sections.resize(atom.sections.size());
    for (std::size_t x = 0; x < atom.sections.size(); ++x) {
      atom.inverse_sections[x] = raw_inverse(atom.sections[atom.perm_inverse(static_cast<Letter>(x))]);
    }
    table->push_back(std::move(atom));
  }

  // Flags are semantic facts; compute them before any word relies on them.
  std::vector<std::pair<bool, bool>> flags;
  {
    WordEngine engine(std::shared_ptr<const AtomTable>(table), degree());
    for (std::size_t i = first; i < table->size(); ++i) {
      Symbol s(static_cast<std::uint32_t>(i), false);
      bool identity = false;
      bool involution = false;
      try {
        identity = engine.is_trivial({s}, kFlagBudget);
        involution = !identity && engine.is_trivial({s, s}, kFlagBudget);
      } catch (const BudgetExceeded&) {
      }
      flags.emplace_back(identity, involution);
    }
  }
  for (std::size_t i = first; i < table->size(); ++i) {
    (*table)[i].identity = flags[i - first].first;
    (*table)[i].involution = flags[i - first].second;
  }
  WordEngine engine(std::shared_ptr<const AtomTable>(table), degree());
  for (std::size_t i = first; i < table->size(); ++i) {
    Atom& atom = (*table)[i];
    for (auto& w : atom.sections) w = engine.reduce(w);
    for (auto& w : atom.inverse_sections) w = engine.reduce(w);
  }
  atoms_ = std::move(table);
}

Symbol GroupDef::intern_node(const Permutation& perm, const std::vector<Word>& sections) const {
  if (perm.degree() != degree() || sections.size() != degree()) {
    throw std::invalid_argument("node needs a permutation and one section per letter");
  }
  std::lock_guard lock(mutex_);
  const std::string key = node_key(perm, sections);
  if (auto it = interned_.find(key); it != interned_.end()) return Symbol(it->second, false);
  auto index = static_cast<std::uint32_t>(atoms_->size());
  interned_.emplace(key, index);
  commit_locked({{"@" + std::to_string(index), perm, sections}});
  return Symbol(index, false);
}

Word GroupDef::intern_portrait(const std::map<Vertex, Permutation>& entries) const {
  for (const auto& [v, p] : entries) {
    for (Letter x : v.letters()) {
      if (x >= degree()) throw std::invalid_argument("portrait vertex letter out of range");
    }
    if (p.degree() != degree()) throw std::invalid_argument("portrait permutation has wrong degree");
  }
  std::lock_guard lock(mutex_);
  std::vector<PendingAtom> pending;
  Word w = intern_portrait_locked(entries, Vertex(), pending);
  if (!pending.empty()) commit_locked(std::move(pending));
  return w;
}

// ---------------------------------------------------------------- word engine

WordEngine::WordEngine(const GroupDef& group) : atoms_(group.atoms()), degree_(group.degree()) {}

WordEngine::WordEngine(std::shared_ptr<const AtomTable> atoms, unsigned degree)
    : atoms_(std::move(atoms)), degree_(degree) {}

Word WordEngine::reduce(const Word& w) const {
  const AtomTable& table = *atoms_;
  Word out;
  out.reserve(w.size());
  for (Symbol s : w) {
    if (s.atom() >= table.size()) throw ResolveError("symbol refers to an unknown atom");
    const Atom& atom = table[s.atom()];
    if (atom.identity) continue;
    if (atom.involution && s.inverted()) s = s.inverse();
    if (!out.empty() && out.back().atom() == s.atom() &&
        (out.back().inverted() != s.inverted() || atom.involution)) {
      out.pop_back();
    } else {
      out.push_back(s);
    }
  }
  return out;
}

Word WordEngine::multiply(const Word& lhs, const Word& rhs) const {
  Word w = lhs;
  w.insert(w.end(), rhs.begin(), rhs.end());
  return reduce(w);
}

Word WordEngine::inverse(const Word& w) const { return reduce(raw_inverse(w)); }

Letter WordEngine::image(const Word& w, Letter x) const {
  const AtomTable& table = *atoms_;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    const Atom& atom = table[it->atom()];
    x = it->inverted() ? atom.perm_inverse(x) : atom.perm(x);
  }
  return x;
}

Permutation WordEngine::permutation(const Word& w) const {
  std::vector<Letter> images(degree_);
  for (unsigned x = 0; x < degree_; ++x) images[x] = image(w, static_cast<Letter>(x));
  return Permutation::from_images(std::move(images));
}

Word WordEngine::section(const Word& w, Letter x) const {
  const AtomTable& table = *atoms_;
  std::vector<const Word*> parts(w.size());
  for (std::size_t i = w.size(); i-- > 0;) {
    const Atom& atom = table[w[i].atom()];
    if (w[i].inverted()) {
      parts[i] = &atom.inverse_sections[x];
      x = atom.perm_inverse(x);
    } else {
      parts[i] = &atom.sections[x];
      x = atom.perm(x);
    }
  }
  Word out;
  for (const Word* part : parts) out.insert(out.end(), part->begin(), part->end());
  return reduce(out);
}

Word WordEngine::section(const Word& w, const Vertex& v) const {
  Word current = w;
  for (Letter x : v.letters()) {
    if (current.empty()) break;
    current = section(current, x);
  }
  return current;
}

Vertex WordEngine::apply(const Word& w, const Vertex& v) const {
  std::vector<Letter> out;
  out.reserve(v.level());
  Word current = w;
  for (Letter x : v.letters()) {
    if (x >= degree_) throw std::invalid_argument("vertex letter out of range");
    if (current.empty()) {
      out.push_back(x);
      continue;
    }
    out.push_back(image(current, x));
    current = section(current, x);
  }
  return Vertex(std::move(out));
}

bool WordEngine::is_trivial(const Word& w, std::size_t budget) {
  if (w.empty()) return true;
  if (auto it = trivial_memo_.find(w); it != trivial_memo_.end()) return it->second;

  std::unordered_set<Word, WordHash> visited;
  std::deque<Word> queue;
  visited.insert(w);
  queue.push_back(w);
  // Words of a non-contracting group can grow without bound, so stored symbols count too.
  std::size_t symbols = w.size();
  while (!queue.empty()) {
    Word current = std::move(queue.front());
    queue.pop_front();
    if (current.empty()) continue;
    if (auto it = trivial_memo_.find(current); it != trivial_memo_.end()) {
      if (it->second) continue;
      trivial_memo_[w] = false;
      return false;
    }
    for (unsigned x = 0; x < degree_; ++x) {
      if (image(current, static_cast<Letter>(x)) != x) {
        trivial_memo_[w] = false;
        return false;
      }
    }
    for (unsigned x = 0; x < degree_; ++x) {
      Word next = section(current, static_cast<Letter>(x));
      if (visited.insert(next).second) {
        symbols += next.size();
        if (visited.size() > budget || symbols / kSymbolsPerState > budget) throw BudgetExceeded(budget);
        queue.push_back(std::move(next));
      }
    }
  }
  for (const Word& v : visited) trivial_memo_[v] = true;
  return true;
}

// ---------------------------------------------------------------- portraits

Portrait::Portrait(unsigned degree, std::size_t depth, std::map<Vertex, Permutation> entries)
    : degree_(degree), depth_(depth) {
  Alphabet check(degree);
  (void)check;
  for (auto& [v, p] : entries) {
    if (v.level() >= depth) throw std::invalid_argument("portrait entry at '" + v.to_string() + "' below its depth");
    if (p.degree() != degree) throw std::invalid_argument("portrait permutation has wrong degree");
    for (Letter x : v.letters()) {
      if (x >= degree) throw std::invalid_argument("portrait vertex letter out of range");
    }
    if (!p.is_identity()) entries_.emplace(v, std::move(p));
  }
}

Permutation Portrait::at(const Vertex& v) const {
  auto it = entries_.find(v);
  return it == entries_.end() ? Permutation::identity(degree_) : it->second;
}

Vertex Portrait::apply(const Vertex& v) const {
  std::vector<Letter> out;
  out.reserve(v.level());
  Vertex prefix;
  for (Letter x : v.letters()) {
    out.push_back(at(prefix)(x));
    prefix = prefix.child(x);
  }
  return Vertex(std::move(out));
}

// ---------------------------------------------------------------- automorphisms

Automorphism::Automorphism(GroupPtr group, Word word) : group_(std::move(group)) {
  if (!group_) throw std::invalid_argument("automorphism without a group");
  word_ = WordEngine(*group_).reduce(word);
}

Automorphism Automorphism::identity(GroupPtr group) { return Automorphism(std::move(group), {}); }

Automorphism Automorphism::generator(GroupPtr group, std::string_view name) {
  if (name == "e") return identity(std::move(group));
  auto index = group->generator_index(name);
  if (!index) throw ResolveError("unknown generator '" + std::string(name) + "'");
  return Automorphism(std::move(group), {Symbol(static_cast<std::uint32_t>(*index), false)});
}

Automorphism Automorphism::node(const Permutation& perm, const std::vector<Automorphism>& sections) {
  if (sections.empty()) throw std::invalid_argument("node needs sections");
  const GroupPtr& group = sections.front().group();
  std::vector<Word> words;
  for (const auto& s : sections) {
    if (s.group() != group) throw std::invalid_argument("node sections over different groups");
    words.push_back(s.word());
  }
  if (perm.is_identity() && std::all_of(words.begin(), words.end(), [](const Word& w) { return w.empty(); })) {
    return identity(group);
  }
  return Automorphism(group, {group->intern_node(perm, words)});
}

Automorphism Automorphism::from_portrait(GroupPtr group, const Portrait& p) {
  if (p.degree() != group->degree()) throw std::invalid_argument("portrait degree differs from the group's");
  Word w = group->intern_portrait(p.entries());
  return Automorphism(std::move(group), std::move(w));
}

std::string Automorphism::to_string() const {
  if (word_.empty()) return "e";
  auto table = group_->atoms();
  std::string out;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    if (i) out += "*";
    out += (*table)[word_[i].atom()].name;
    if (word_[i].inverted()) out += "^-1";
  }
  return out;
}

namespace {

void require_same_group(const Automorphism& g, const Automorphism& h) {
  if (g.group() != h.group()) throw std::invalid_argument("elements belong to different group definitions");
}

}  // namespace

Vertex apply(const Automorphism& g, const Vertex& v) { return WordEngine(*g.group()).apply(g.word(), v); }

Permutation root_permutation(const Automorphism& g) { return WordEngine(*g.group()).permutation(g.word()); }

Automorphism section(const Automorphism& g, const Vertex& v) {
  return Automorphism(g.group(), WordEngine(*g.group()).section(g.word(), v));
}

Automorphism compose(const Automorphism& g, const Automorphism& h) {
  require_same_group(g, h);
  return Automorphism(g.group(), WordEngine(*g.group()).multiply(g.word(), h.word()));
}

Automorphism inverse(const Automorphism& g) {
  return Automorphism(g.group(), WordEngine(*g.group()).inverse(g.word()));
}

bool is_trivial(const Automorphism& g, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("budget must be positive");
  return WordEngine(*g.group()).is_trivial(g.word(), budget);
}

bool equal(const Automorphism& g, const Automorphism& h, std::size_t budget) {
  require_same_group(g, h);
  WordEngine engine(*g.group());
  return engine.is_trivial(engine.multiply(engine.inverse(g.word()), h.word()), budget);
}

Portrait portrait(const Automorphism& g, std::size_t depth) {
  WordEngine engine(*g.group());
  std::map<Vertex, Permutation> entries;
  std::vector<std::pair<Vertex, Word>> stack{{Vertex(), g.word()}};
  while (!stack.empty()) {
    auto [v, w] = std::move(stack.back());
    stack.pop_back();
    if (w.empty() || v.level() >= depth) continue;
    Permutation p = engine.permutation(w);
    if (!p.is_identity()) entries.emplace(v, p);
    for (unsigned x = 0; x < engine.degree(); ++x) {
      stack.emplace_back(v.child(static_cast<Letter>(x)), engine.section(w, static_cast<Letter>(x)));
    }
  }
  return Portrait(engine.degree(), depth, std::move(entries));
}

// ---------------------------------------------------------------- minimization

MinimalAutomaton::MinimalAutomaton(unsigned degree, std::vector<AutomatonState> states)
    : degree_(degree), states_(std::move(states)) {}

std::optional<std::size_t> MinimalAutomaton::identity_state() const {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    if (s.perm.is_identity() && std::all_of(s.next.begin(), s.next.end(), [i](std::size_t t) { return t == i; })) {
      return i;
    }
  }
  return std::nullopt;
}

std::string MinimalAutomaton::serialize() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    out << "q" << i << " [";
    for (std::size_t x = 0; x < degree_; ++x) out << (x ? " " : "") << int(states_[i].perm(static_cast<Letter>(x)));
    out << "]";
    for (std::size_t t : states_[i].next) out << " q" << t;
    out << "\n";
  }
  return out.str();
}

Closure section_closure(WordEngine& engine, const Word& start, std::size_t budget) {
  Closure closure;
  std::unordered_map<Word, std::size_t, WordHash> index;
  index.emplace(start, 0);
  closure.states.push_back(start);
  std::size_t symbols = start.size();
  for (std::size_t i = 0; i < closure.states.size(); ++i) {
    std::vector<std::size_t> next;
    for (unsigned x = 0; x < engine.degree(); ++x) {
      Word child = engine.section(closure.states[i], static_cast<Letter>(x));
      auto [it, inserted] = index.emplace(child, closure.states.size());
      if (inserted) {
        symbols += child.size();
        if (closure.states.size() >= budget || symbols / kSymbolsPerState > budget) throw BudgetExceeded(budget);
        closure.states.push_back(std::move(child));
      }
      next.push_back(it->second);
    }
    closure.next.push_back(std::move(next));
  }
  return closure;
}

MinimalAutomaton minimize(WordEngine& engine, const Word& w, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("budget must be positive");
  Closure closure = section_closure(engine, w, budget);
  const std::size_t n = closure.states.size();
  std::vector<Permutation> perms(n);
  for (std::size_t i = 0; i < n; ++i) perms[i] = engine.permutation(closure.states[i]);

  // Moore refinement: start from root permutations, split by successor classes until stable.
  std::vector<std::size_t> cls(n);
  std::size_t class_count = 0;
  {
    std::map<Permutation, std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) cls[i] = ids.emplace(perms[i], ids.size()).first->second;
    class_count = ids.size();
  }
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> refined(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> signature{cls[i]};
      for (std::size_t t : closure.next[i]) signature.push_back(cls[t]);
      refined[i] = ids.emplace(std::move(signature), ids.size()).first->second;
    }
    cls = std::move(refined);
    if (ids.size() == class_count) break;
    class_count = ids.size();
  }

  // Canonical numbering: breadth-first from the initial state, children in letter order.
  std::vector<std::size_t> representative(class_count);
  for (std::size_t i = n; i-- > 0;) representative[cls[i]] = i;
  std::vector<std::size_t> order_of(class_count, SIZE_MAX);
  std::vector<std::size_t> order;
  order_of[cls[0]] = 0;
  order.push_back(cls[0]);
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t t : closure.next[representative[order[k]]]) {
      if (order_of[cls[t]] == SIZE_MAX) {
        order_of[cls[t]] = order.size();
        order.push_back(cls[t]);
      }
    }
  }
  std::vector<AutomatonState> states;
  for (std::size_t c : order) {
    std::size_t rep = representative[c];
    AutomatonState s{perms[rep], {}};
    for (std::size_t t : closure.next[rep]) s.next.push_back(order_of[cls[t]]);
    states.push_back(std::move(s));
  }
  return MinimalAutomaton(engine.degree(), std::move(states));
}

MinimalAutomaton minimize(const Automorphism& g, std::size_t budget) {
  WordEngine engine(*g.group());
  return minimize(engine, g.word(), budget);
}

}  // namespace branchlab
