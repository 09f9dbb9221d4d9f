#include "branchlab/diag.hpp"

#include "branchlab/catalog.hpp"
#include "branchlab/measure.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace branchlab {

namespace {

std::uint64_t level_size(unsigned d, std::size_t k) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < k; ++i) {
    size *= d;
    if (size > (std::uint64_t{1} << 31)) throw std::invalid_argument("level too large");
  }
  return size;
}

// C(total, n), saturating just above `cap`.
std::uint64_t choose_capped(std::uint64_t total, std::size_t n, std::uint64_t cap) {
  if (n > total) return 0;
  boost::multiprecision::cpp_int value = 1;
  for (std::size_t i = 0; i < n; ++i) {
    value = value * (total - i) / (i + 1);
  }
  return value > cap ? cap + 1 : static_cast<std::uint64_t>(value);
}

Integer factorial(std::size_t n) {
  Integer f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<std::vector<std::uint32_t>> generator_actions(const GroupDef& group, WordEngine& engine,
                                                          std::size_t level) {
  std::vector<std::vector<std::uint32_t>> actions;
  for (std::size_t i = 0; i < group.generators().size(); ++i) {
    Word w = engine.reduce({Symbol(static_cast<std::uint32_t>(i), false)});
    if (w.empty()) continue;
    actions.push_back(level_action(engine, w, level));
  }
  return actions;
}

}  // namespace

std::string tuple_string(const TupleClass& t, std::size_t level, unsigned degree) {
  std::string out = "{";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += Vertex::from_index(t[i], level, degree).to_string();
  }
  return out + "}";
}

std::size_t OrbitPartition::index_of(const TupleClass& t) const {
  auto it = std::lower_bound(tuples.begin(), tuples.end(), t);
  if (it == tuples.end() || *it != t) throw std::invalid_argument("not a distinct tuple class of this partition");
  return static_cast<std::size_t>(it - tuples.begin());
}

OrbitPartition orbits(const GroupPtr& group, std::size_t n, std::size_t level, std::size_t budget) {
  if (n < 1) throw std::invalid_argument("tuple size must be at least 1");
  const unsigned d = group->degree();
  const std::uint64_t size = level_size(d, level);
  if (size < n) throw std::invalid_argument("fewer than n vertices on this level");
  if (choose_capped(size, n, budget) > budget) throw BudgetExceeded(budget);

  OrbitPartition part;
  part.group = group;
  part.level = level;
  part.n = n;
  TupleClass current(n);
  std::iota(current.begin(), current.end(), 0u);
  while (true) {
    part.tuples.push_back(current);
    std::size_t i = n;
    while (i > 0 && current[i - 1] == size - n + i - 1) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < n; ++j) current[j] = current[j - 1] + 1;
  }

  WordEngine engine(*group);
  const auto actions = generator_actions(*group, engine, level);
  std::vector<std::size_t> parent(part.tuples.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  TupleClass image(n);
  for (const auto& act : actions) {
    for (std::size_t t = 0; t < part.tuples.size(); ++t) {
      for (std::size_t i = 0; i < n; ++i) image[i] = act[part.tuples[t][i]];
      std::sort(image.begin(), image.end());
      auto a = find(t), b = find(part.index_of(image));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Roots are least members, so scanning in order numbers orbits by least member.
  std::vector<std::size_t> id_of_root(part.tuples.size(), SIZE_MAX);
  part.orbit_of.resize(part.tuples.size());
  for (std::size_t t = 0; t < part.tuples.size(); ++t) {
    auto r = find(t);
    if (id_of_root[r] == SIZE_MAX) {
      id_of_root[r] = part.orbits.size();
      part.orbits.emplace_back();
    }
    part.orbit_of[t] = id_of_root[r];
    part.orbits[id_of_root[r]].push_back(t);
  }
  return part;
}

Rational orbit_weight(const OrbitPartition& partition, std::size_t orbit) {
  const unsigned d = partition.degree();
  return Rational(Integer(partition.orbits[orbit].size()) * factorial(partition.n),
                  power(d, static_cast<unsigned>(partition.level * partition.n)));
}

ComponentTower component_tower(const GroupPtr& group, std::size_t n, std::size_t max_level, std::size_t budget) {
  const unsigned d = group->degree();
  std::size_t first = 1;
  while (level_size(d, first) < n) ++first;
  if (max_level < first) throw std::invalid_argument("max level below the first level with n distinct vertices");

  ComponentTower tower;
  tower.n = n;
  tower.consistent = true;
  for (std::size_t k = first; k <= max_level; ++k) {
    TowerLevel lvl{orbits(group, n, k, budget), {}, 0, 0};
    const OrbitPartition* prev = tower.levels.empty() ? nullptr : &tower.levels.back().partition;
    for (std::size_t o = 0; o < lvl.partition.orbits.size(); ++o) {
      ComponentNode node;
      node.level = k;
      node.orbit = o;
      node.size = lvl.partition.orbits[o].size();
      node.weight = orbit_weight(lvl.partition, o);
      lvl.total_weight += node.weight;
      if (prev) {
        bool first_member = true;
        for (auto t : lvl.partition.orbits[o]) {
          TupleClass truncated;
          for (auto v : lvl.partition.tuples[t]) truncated.push_back(v / d);
          std::optional<std::size_t> parent;
          if (std::adjacent_find(truncated.begin(), truncated.end()) == truncated.end()) {
            parent = prev->orbit_of[prev->index_of(truncated)];
          }
          if (first_member) {
            node.parent = parent;
            first_member = false;
          } else if (parent != node.parent) {
            tower.consistent = false;
          }
        }
      }
      lvl.nodes.push_back(node);
    }
    const std::uint64_t size = level_size(d, k);
    Integer falling = 1;
    for (std::size_t i = 0; i < n; ++i) falling *= size - i;
    Rational distinct(falling, power(d, static_cast<unsigned>(k * n)));
    if (lvl.total_weight != distinct) tower.consistent = false;
    lvl.excluded_mass = 1 - distinct;

    if (!tower.levels.empty()) {
      auto& parents = tower.levels.back();
      if (lvl.nodes.size() < parents.nodes.size()) tower.consistent = false;
      std::vector<Rational> sums(parents.nodes.size());
      for (const auto& node : lvl.nodes) {
        if (node.parent) sums[*node.parent] += node.weight;
      }
      for (std::size_t p = 0; p < parents.nodes.size(); ++p) {
        if (sums[p] != parents.nodes[p].weight) tower.consistent = false;
      }
    }
    tower.levels.push_back(std::move(lvl));
  }
  return tower;
}

VertexFractions vertex_fractions(const Automorphism& g, std::size_t level, std::size_t depth, std::size_t budget) {
  if (depth < level) throw std::invalid_argument("depth below the component level");
  WordEngine engine(*g.group());
  const unsigned d = engine.degree();
  const std::uint64_t size = level_size(d, level);
  const std::size_t below = depth - level;
  const Integer span = power(d, static_cast<unsigned>(below));
  VertexFractions out{std::vector<Rational>(size), std::vector<Rational>(size)};
  std::map<Word, LevelCounts> memo;
  std::function<void(const Word&, std::size_t, std::uint64_t)> walk = [&](const Word& w, std::size_t k,
                                                                          std::uint64_t index) {
    if (k == level) {
      auto it = memo.find(w);
      if (it == memo.end()) it = memo.emplace(w, level_counts(engine, w, below, budget)).first;
      out.fixed[index] = Rational(it->second.fixed[below], span);
      out.interior[index] = Rational(it->second.interior[below], span);
      return;
    }
    for (unsigned x = 0; x < d; ++x) {
      if (!w.empty() && engine.image(w, static_cast<Letter>(x)) != x) continue;
      walk(w.empty() ? w : engine.section(w, static_cast<Letter>(x)), k + 1, index * d + x);
    }
  };
  walk(g.word(), 0, 0);
  return out;
}

std::vector<CharacterInterval> char_intervals(const OrbitPartition& partition, const VertexFractions& fractions) {
  std::vector<CharacterInterval> out;
  for (const auto& members : partition.orbits) {
    CharacterInterval iv{0, 0};
    for (auto t : members) {
      Rational lo = 1, hi = 1;
      for (auto v : partition.tuples[t]) {
        lo *= fractions.interior[v];
        hi *= fractions.fixed[v];
      }
      iv.lower += lo;
      iv.upper += hi;
    }
    iv.lower /= members.size();
    iv.upper /= members.size();
    out.push_back(iv);
  }
  return out;
}

std::vector<CharacterInterval> char_intervals(const OrbitPartition& partition, const Automorphism& g,
                                              std::size_t depth, std::size_t budget) {
  if (g.group() != partition.group) throw std::invalid_argument("element and partition over different groups");
  return char_intervals(partition, vertex_fractions(g, partition.level, depth, budget));
}

CharacterInterval char_interval(const OrbitPartition& partition, std::size_t orbit, const Automorphism& g,
                                std::size_t depth, std::size_t budget) {
  if (orbit >= partition.orbits.size()) throw std::invalid_argument("no such component");
  return char_intervals(partition, g, depth, budget)[orbit];
}

SumCheck char_sum_check(const GroupPtr& group, std::size_t n, const Automorphism& g, std::size_t level,
                        std::size_t depth, std::size_t budget) {
  auto partition = orbits(group, n, level, budget);
  auto intervals = char_intervals(partition, g, depth, budget);
  SumCheck check{0, 0, 0, false};
  for (std::size_t o = 0; o < intervals.size(); ++o) {
    Rational w = orbit_weight(partition, o);
    check.lower += w * intervals[o].lower;
    check.upper += w * intervals[o].upper;
  }

  // m(u) = mu(Fix(g) inside X_u) for u on the level, then n! e_n(m) over distinct coordinates.
  WordEngine engine(*group);
  const unsigned d = group->degree();
  const Integer cylinders = power(d, static_cast<unsigned>(level));
  std::vector<Rational> e(n + 1);
  e[0] = 1;
  std::function<void(const Word&, std::size_t)> walk = [&](const Word& w, std::size_t k) {
    if (k == level) {
      Rational m = fix_measure(engine, w, budget) / cylinders;
      for (std::size_t j = n; j >= 1; --j) e[j] += e[j - 1] * m;
      return;
    }
    for (unsigned x = 0; x < d; ++x) {
      if (!w.empty() && engine.image(w, static_cast<Letter>(x)) != x) continue;
      walk(w.empty() ? w : engine.section(w, static_cast<Letter>(x)), k + 1);
    }
  };
  walk(g.word(), 0);
  check.exact = e[n] * factorial(n);
  check.holds = check.lower <= check.exact && check.exact <= check.upper;
  return check;
}

DistinctnessReport distinctness_search(const GroupPtr& group, std::size_t n_max, std::size_t level, std::size_t depth,
                                       std::size_t radius, std::size_t budget) {
  DistinctnessReport report;
  report.level = level;
  report.depth = depth;
  report.radius = radius;
  const unsigned d = group->degree();
  std::vector<OrbitPartition> partitions;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (level_size(d, level) < n) break;
    partitions.push_back(orbits(group, n, level, budget));
    for (std::size_t o = 0; o < partitions.back().orbits.size(); ++o) {
      report.components.push_back({n, o, partitions.back().representative(o)});
    }
  }
  for (std::size_t i = 0; i < report.components.size(); ++i) {
    for (std::size_t j = i + 1; j < report.components.size(); ++j) {
      report.pairs.push_back({i, j, std::nullopt, {0, 0}, {0, 0}});
    }
  }
  report.unresolved = report.pairs.size();
  if (report.unresolved == 0) return report;

  for_each_ball_word(*group, radius, [&](const Word& raw) {
    if (raw.empty()) return false;
    Automorphism g(group, raw);
    auto fractions = vertex_fractions(g, level, depth, budget);
    std::vector<CharacterInterval> intervals;
    for (const auto& p : partitions) {
      auto part = char_intervals(p, fractions);
      intervals.insert(intervals.end(), part.begin(), part.end());
    }
    for (auto& pair : report.pairs) {
      if (pair.witness) continue;
      const auto& a = intervals[pair.first];
      const auto& b = intervals[pair.second];
      if (a.upper < b.lower || b.upper < a.lower) {
        pair.witness = g;
        pair.first_interval = a;
        pair.second_interval = b;
        --report.unresolved;
      }
    }
    return report.unresolved == 0;
  });
  return report;
}

SymmetrizationCheck symmetrization_identity_check(const std::vector<std::vector<Vertex>>& sets, std::size_t budget) {
  if (sets.empty()) throw std::invalid_argument("need at least one set");
  const std::size_t n = sets.size();
  std::vector<Vertex> b;
  std::optional<std::size_t> level;
  for (const auto& s : sets) {
    for (const auto& v : s) {
      if (level && *level != v.level()) throw std::invalid_argument("all vertices must lie on one level");
      level = v.level();
      b.push_back(v);
    }
  }
  std::sort(b.begin(), b.end());
  if (std::adjacent_find(b.begin(), b.end()) != b.end()) {
    throw std::invalid_argument("sets are not pairwise disjoint (or list a vertex twice)");
  }
  std::vector<std::size_t> owner(b.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& v : sets[i]) owner[std::lower_bound(b.begin(), b.end(), v) - b.begin()] = i;
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= std::max<std::size_t>(b.size(), 1);
    if (total > budget) throw BudgetExceeded(budget);
  }

  using Tuple = std::vector<std::size_t>;
  // B^n minus the union of (B \ A_j)^n: tuples meeting every A_j.
  std::set<Tuple> lhs, rhs;
  if (!b.empty()) {
    Tuple t(n, 0);
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t c = code;
      for (std::size_t i = n; i-- > 0;) {
        t[i] = c % b.size();
        c /= b.size();
      }
      std::vector<bool> hit(n, false);
      for (auto x : t) hit[owner[x]] = true;
      if (std::all_of(hit.begin(), hit.end(), [](bool h) { return h; })) rhs.insert(t);
    }
  }
  // Sym(n) applied to A_1 x ... x A_n.
  Tuple pick(n), placed(n);
  std::function<void(std::size_t)> product = [&](std::size_t i) {
    if (i == n) {
      std::vector<std::size_t> sigma(n);
      std::iota(sigma.begin(), sigma.end(), 0);
      do {
        for (std::size_t p = 0; p < n; ++p) placed[sigma[p]] = pick[p];
        lhs.insert(placed);
      } while (std::next_permutation(sigma.begin(), sigma.end()));
      return;
    }
    for (const auto& v : sets[i]) {
      pick[i] = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), v) - b.begin());
      product(i + 1);
    }
  };
  product(0);
  return {lhs.size(), rhs.size(), lhs == rhs};
}

std::vector<std::uint8_t> r_invariant(const std::vector<Vertex>& tuple) {
  if (tuple.empty()) throw std::invalid_argument("empty tuple");
  const std::size_t level = tuple.front().level();
  if (level < 2 || level % 2 != 0) throw std::invalid_argument("vertices must lie on an even level 2j >= 2");
  std::vector<std::uint8_t> r(level / 2, 0);
  for (const auto& v : tuple) {
    if (v.level() != level) throw std::invalid_argument("vertices must lie on one level");
    for (std::size_t i = 0; i < r.size(); ++i) r[i] ^= v[2 * i + 1] & 1;
  }
  return r;
}

RInvarianceReport r_invariance_check(std::size_t j, std::size_t n, std::size_t budget) {
  if (j < 1 || j > 6) throw std::invalid_argument("j must be between 1 and 6");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("the invariance claim needs an even n >= 2");
  const std::size_t level = 2 * j;
  auto group = switch_group(static_cast<unsigned>(level));
  const std::uint32_t size = 1u << level;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= size;
    if (total > budget) throw BudgetExceeded(budget);
  }

  // Per-vertex contribution: bit i is the letter at 0-based position 2i+1.
  std::vector<std::uint32_t> bits(size, 0);
  for (std::uint32_t v = 0; v < size; ++v) {
    for (std::size_t i = 0; i < j; ++i) bits[v] |= ((v >> (level - 2 - 2 * i)) & 1u) << i;
  }
  auto r_of = [&](auto begin, auto end) {
    std::uint32_t r = 0;
    for (auto it = begin; it != end; ++it) r ^= bits[*it];
    return r;
  };

  RInvarianceReport report;
  report.j = j;
  report.n = n;
  report.invariant = true;
  WordEngine engine(*group);
  const auto actions = generator_actions(*group, engine, level);
  report.generators = actions.size();
  std::vector<std::uint32_t> t(n), image(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (std::size_t i = n; i-- > 0;) {
      t[i] = static_cast<std::uint32_t>(c % size);
      c /= size;
    }
    const std::uint32_t r = r_of(t.begin(), t.end());
    for (const auto& act : actions) {
      for (std::size_t i = 0; i < n; ++i) image[i] = act[t[i]];
      if (r_of(image.begin(), image.end()) != r) report.invariant = false;
    }
    ++report.tuples_checked;
  }

  // Distribution of r over all ordered tuples: n-fold XOR convolution of the one-vertex counts.
  const std::uint32_t classes = 1u << j;
  std::vector<Integer> dist(classes, 0), single(classes, 0);
  dist[0] = 1;
  for (auto b : bits) single[b] += 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Integer> next(classes, 0);
    for (std::uint32_t x = 0; x < classes; ++x) {
      for (std::uint32_t y = 0; y < classes; ++y) next[x ^ y] += dist[x] * single[y];
    }
    dist = std::move(next);
  }
  for (std::uint32_t x = 0; x < classes; ++x) {
    if (dist[x] == 0) continue;
    std::vector<std::uint8_t> key(j);
    for (std::size_t i = 0; i < j; ++i) key[i] = (x >> i) & 1;
    report.class_masses[key] = Rational(dist[x], Integer(total));
  }

  auto partition = orbits(group, n, level, budget);
  report.orbit_count = partition.orbits.size();
  report.constant_on_orbits = true;
  for (const auto& members : partition.orbits) {
    const auto& first = partition.tuples[members.front()];
    const std::uint32_t r = r_of(first.begin(), first.end());
    for (auto m : members) {
      const auto& tup = partition.tuples[m];
      if (r_of(tup.begin(), tup.end()) != r) report.constant_on_orbits = false;
    }
  }
  return report;
}

}  // namespace branchlab
