#include "branchlab/catalog.hpp"

#include <charconv>
#include <map>
#include <numeric>

namespace branchlab {

namespace {

NamedWord named(std::initializer_list<const char*> names) {
  NamedWord w;
  for (const char* n : names) {
    std::string s(n);
    bool inv = s.size() > 3 && s.compare(s.size() - 3, 3, "^-1") == 0;
    if (inv) s.resize(s.size() - 3);
    w.push_back({s, inv});
  }
  return w;
}

GeneratorDef recursion(std::string name, Permutation perm, std::vector<NamedWord> sections) {
  return {std::move(name), RecursionBody{std::move(perm), std::move(sections)}};
}

Permutation swap2() { return Permutation::from_images({1, 0}); }

CatalogEntry grigorchuk() {
  auto id = Permutation::identity(2);
  std::vector<GeneratorDef> gens{
      recursion("a", swap2(), {{}, {}}),
      recursion("b", id, {named({"a"}), named({"c"})}),
      recursion("c", id, {named({"a"}), named({"d"})}),
      recursion("d", id, {{}, named({"b"})}),
  };
  return {"grigorchuk", GroupDef::create(2, std::move(gens), {"grigorchuk", true}), true, 8,
          {"a*a", "b*b", "c*c", "d*d", "b*c*d"}};
}

CatalogEntry gupta_sidki() {
  auto cycle = Permutation::from_cycles(3, {{0, 1, 2}});
  std::vector<GeneratorDef> gens{
      recursion("t", cycle, {{}, {}, {}}),
      recursion("a", Permutation::identity(3), {named({"t"}), named({"t^-1"}), named({"a"})}),
  };
  return {"gupta-sidki-3", GroupDef::create(3, std::move(gens), {"gupta-sidki-3", true}), true, 4,
          {"t*t*t", "a*a*a"}};
}

CatalogEntry odometer() {
  std::vector<GeneratorDef> gens{recursion("a", swap2(), {{}, named({"a"})})};
  return {"binary-odometer", GroupDef::create(2, std::move(gens), {"binary-odometer", true}), true, 0, {}};
}

CatalogEntry trivial_group() {
  return {"trivial", GroupDef::create(2, {}, {"trivial", false}), false, 0, {}};
}

std::optional<unsigned> parse_truncation(std::string_view text) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

void verify_relations(const CatalogEntry& entry) {
  WordEngine engine(*entry.group);
  for (const auto& rel : entry.relations) {
    Word w;
    std::size_t start = 0;
    while (start <= rel.size()) {
      auto stop = rel.find('*', start);
      if (stop == std::string::npos) stop = rel.size();
      std::string token = rel.substr(start, stop - start);
      bool inv = token.size() > 3 && token.compare(token.size() - 3, 3, "^-1") == 0;
      if (inv) token.resize(token.size() - 3);
      auto index = entry.group->generator_index(token);
      if (!index) throw std::logic_error("catalog relation uses unknown generator " + token);
      w.emplace_back(static_cast<std::uint32_t>(*index), inv);
      start = stop + 1;
    }
    if (!engine.is_trivial(engine.reduce(w))) {
      throw std::logic_error("catalog relation " + rel + " fails in " + entry.name);
    }
  }
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"grigorchuk", "gupta-sidki-3", "binary-odometer", "trivial", "switch-group(L)"};
}

GroupPtr switch_group(unsigned truncation) {
  std::vector<GeneratorDef> gens;
  auto swap = swap2();
  for (unsigned level = 0; level <= truncation; ++level) {
    const std::uint64_t count = std::uint64_t{1} << level;
    if (level % 2 == 0) {
      for (std::uint64_t i = 0; i < count; ++i) {
        Vertex v = Vertex::from_index(i, level, 2);
        gens.push_back({"s" + v.to_string(), PortraitBody{{{v, swap}}}});
      }
    } else {
      PortraitBody body;
      for (std::uint64_t i = 0; i < count; ++i) body.entries.emplace(Vertex::from_index(i, level, 2), swap);
      gens.push_back({"h" + std::to_string(level), std::move(body)});
    }
  }
  return GroupDef::create(2, std::move(gens), {"switch-group(" + std::to_string(truncation) + ")", true});
}

CatalogEntry load(std::string_view name) {
  CatalogEntry entry;
  if (name == "grigorchuk") {
    entry = grigorchuk();
  } else if (name == "gupta-sidki-3") {
    entry = gupta_sidki();
  } else if (name == "binary-odometer") {
    entry = odometer();
  } else if (name == "trivial") {
    entry = trivial_group();
  } else if (name.starts_with("switch-group")) {
    std::string_view rest = name.substr(std::string_view("switch-group").size());
    std::optional<unsigned> level;
    if (rest.size() > 2 && rest.front() == '(' && rest.back() == ')') {
      level = parse_truncation(rest.substr(1, rest.size() - 2));
    } else if (rest.size() > 1 && rest.front() == ':') {
      level = parse_truncation(rest.substr(1));
    }
    if (!level || *level > 12) {
      throw std::invalid_argument("invalid switch-group truncation in '" + std::string(name) +
                                  "' (expected switch-group(L) with 0 <= L <= 12)");
    }
    entry.name = "switch-group(" + std::to_string(*level) + ")";
    entry.group = switch_group(*level);
    entry.level_transitive = true;
    entry.weakly_branch_evidence_depth = *level;
    entry.relations = {"s*s"};
    if (*level >= 1) entry.relations.push_back("h1*h1");
  } else {
    throw std::invalid_argument("unknown catalog group '" + std::string(name) + "'");
  }
  verify_relations(entry);
  return entry;
}

std::vector<Symbol> ball_alphabet(const GroupDef& group) {
  auto table = group.atoms();
  std::vector<Symbol> symbols;
  for (std::size_t i = 0; i < group.generators().size(); ++i) {
    const Atom& atom = (*table)[i];
    if (atom.identity) continue;
    symbols.emplace_back(static_cast<std::uint32_t>(i), false);
    if (!atom.involution) symbols.emplace_back(static_cast<std::uint32_t>(i), true);
  }
  return symbols;
}

bool for_each_ball_word(const GroupDef& group, std::size_t radius, const std::function<bool(const Word&)>& visit) {
  auto table = group.atoms();
  const auto symbols = ball_alphabet(group);
  std::vector<Word> layer{Word{}};
  if (visit(layer.front())) return true;
  for (std::size_t length = 1; length <= radius; ++length) {
    std::vector<Word> next;
    for (const Word& w : layer) {
      for (Symbol s : symbols) {
        if (!w.empty()) {
          Symbol last = w.back();
          if (last == s.inverse()) continue;
          if (last == s && (*table)[s.atom()].involution) continue;
        }
        Word extended = w;
        extended.push_back(s);
        if (visit(extended)) return true;
        next.push_back(std::move(extended));
      }
    }
    layer = std::move(next);
  }
  return false;
}

std::vector<std::uint32_t> level_action(WordEngine& engine, const Word& w, std::size_t k) {
  const unsigned d = engine.degree();
  std::map<std::pair<Word, std::size_t>, std::vector<std::uint32_t>> memo;
  std::function<const std::vector<std::uint32_t>&(const Word&, std::size_t)> rec =
      [&](const Word& word, std::size_t depth) -> const std::vector<std::uint32_t>& {
    auto key = std::make_pair(word, depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::uint32_t size = 1;
    for (std::size_t i = 0; i < depth; ++i) size *= d;
    std::vector<std::uint32_t> images(size);
    if (word.empty() || depth == 0) {
      std::iota(images.begin(), images.end(), 0u);
    } else {
      const std::uint32_t block = size / d;
      Permutation p = engine.permutation(word);
      for (unsigned x = 0; x < d; ++x) {
        const auto& child = rec(engine.section(word, static_cast<Letter>(x)), depth - 1);
        for (std::uint32_t i = 0; i < block; ++i) images[x * block + i] = p(static_cast<Letter>(x)) * block + child[i];
      }
    }
    return memo.emplace(std::move(key), std::move(images)).first->second;
  };
  return rec(w, k);
}

TransitivityReport check_level_transitive(const GroupDef& group, std::size_t k) {
  if (k < 1) throw std::invalid_argument("level must be at least 1");
  WordEngine engine(group);
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < k; ++i) size *= group.degree();
  if (size > (std::uint64_t{1} << 26)) throw std::invalid_argument("level too large for an orbit sweep");
  std::vector<std::uint32_t> parent(size);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < group.generators().size(); ++i) {
    auto images = level_action(engine, engine.reduce({Symbol(static_cast<std::uint32_t>(i), false)}), k);
    for (std::uint32_t v = 0; v < size; ++v) {
      auto a = find(v), b = find(images[v]);
      if (a != b) parent[a] = b;
    }
  }
  std::size_t orbits = 0;
  for (std::uint32_t v = 0; v < size; ++v) orbits += find(v) == v;
  return {orbits == 1, orbits};
}

bool supported_in(WordEngine& engine, const Word& w, const Vertex& v, std::size_t budget) {
  Word current = w;
  for (std::size_t i = 0; i < v.level(); ++i) {
    if (current.empty()) return true;
    if (!engine.permutation(current).is_identity()) return false;
    for (unsigned x = 0; x < engine.degree(); ++x) {
      if (x == v[i]) continue;
      if (!engine.is_trivial(engine.section(current, static_cast<Letter>(x)), budget)) return false;
    }
    current = engine.section(current, v[i]);
  }
  return true;
}

std::optional<Automorphism> rist_witness(const GroupPtr& group, const Vertex& v, std::size_t radius,
                                         std::size_t budget) {
  WordEngine engine(*group);
  std::optional<Automorphism> found;
  for_each_ball_word(*group, radius, [&](const Word& raw) {
    if (raw.empty()) return false;
    Word w = engine.reduce(raw);
    if (!supported_in(engine, w, v, budget)) return false;
    if (engine.is_trivial(engine.section(w, v), budget)) return false;
    found.emplace(group, w);
    return true;
  });
  return found;
}

}  // namespace branchlab
