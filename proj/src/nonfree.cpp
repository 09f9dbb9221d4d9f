#include "branchlab/nonfree.hpp"

#include "branchlab/catalog.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace branchlab {

namespace {

std::uint64_t level_size(unsigned d, std::size_t k) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < k; ++i) {
    size *= d;
    if (size > (std::uint64_t{1} << 22)) throw std::invalid_argument("level too large for a certificate search");
  }
  return size;
}

// Indices of level-k vertices fixed by w with trivial section, ascending.
std::vector<std::uint64_t> interior_indices(WordEngine& engine, const Word& w, std::size_t k, std::size_t budget) {
  std::vector<std::uint64_t> out;
  const unsigned d = engine.degree();
  std::function<void(const Word&, std::size_t, std::uint64_t)> walk = [&](const Word& word, std::size_t depth,
                                                                          std::uint64_t index) {
    if (depth == k) {
      if (engine.is_trivial(word, budget)) out.push_back(index);
      return;
    }
    if (word.empty()) {
      std::uint64_t span = 1;
      for (std::size_t i = depth; i < k; ++i) span *= d;
      for (std::uint64_t i = 0; i < span; ++i) out.push_back(index * span + i);
      return;
    }
    for (unsigned x = 0; x < d; ++x) {
      if (engine.image(word, static_cast<Letter>(x)) != x) continue;
      walk(engine.section(word, static_cast<Letter>(x)), depth + 1, index * d + x);
    }
  };
  walk(w, 0, 0);
  return out;
}

// Splits every class by membership in `subset`; returns whether the class count grew.
bool refine(std::vector<std::uint32_t>& classes, std::size_t& count, const std::vector<std::uint64_t>& subset) {
  std::vector<bool> in(classes.size(), false);
  for (auto i : subset) in[i] = true;
  std::map<std::pair<std::uint32_t, bool>, std::uint32_t> relabel;
  std::vector<std::uint32_t> next(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    auto key = std::make_pair(classes[i], static_cast<bool>(in[i]));
    auto it = relabel.try_emplace(key, static_cast<std::uint32_t>(relabel.size())).first;
    next[i] = it->second;
  }
  if (relabel.size() == count) return false;
  classes = std::move(next);
  count = relabel.size();
  return true;
}

}  // namespace

TnfCertificate tnf_certificate(const GroupPtr& group, std::size_t level, std::size_t max_radius, std::size_t budget) {
  if (level < 1) throw std::invalid_argument("certificate level must be at least 1");
  const unsigned d = group->degree();
  const std::uint64_t size = level_size(d, level);
  WordEngine engine(*group);

  TnfCertificate cert;
  cert.degree = d;
  cert.level = level;
  cert.radius_searched = max_radius;
  std::vector<std::uint32_t> classes(size, 0);
  cert.atoms = 1;
  if (size == 1) {
    cert.achieved = true;
    cert.minimal_radius = 0;
    return cert;
  }
  for_each_ball_word(*group, max_radius, [&](const Word& raw) {
    if (raw.empty()) return false;
    ++cert.words_examined;
    Word w = engine.reduce(raw);
    auto subset = interior_indices(engine, w, level, budget);
    if (!refine(classes, cert.atoms, subset)) return false;
    std::vector<Vertex> vertices;
    for (auto i : subset) vertices.push_back(Vertex::from_index(i, level, d));
    cert.entries.push_back({Automorphism(group, w), std::move(vertices)});
    if (cert.atoms == size) {
      cert.achieved = true;
      cert.minimal_radius = raw.size();
      cert.radius_searched = raw.size();
      return true;
    }
    return false;
  });
  return cert;
}

bool validate_tnf(const TnfCertificate& certificate, std::size_t budget) {
  const unsigned d = certificate.degree;
  const std::uint64_t size = level_size(d, certificate.level);
  std::vector<std::uint32_t> classes(size, 0);
  std::size_t count = 1;
  for (const auto& entry : certificate.entries) {
    if (fix_interior(entry.element, certificate.level, budget) != entry.interior) return false;
    std::vector<std::uint64_t> subset;
    for (const auto& v : entry.interior) subset.push_back(v.index(d));
    refine(classes, count, subset);
  }
  return count == certificate.atoms && (count == size) == certificate.achieved;
}

std::optional<SupportCandidate> support_search(const GroupPtr& group, const Vertex& v, std::size_t radius,
                                               std::size_t budget) {
  WordEngine engine(*group);
  const unsigned d = group->degree();
  std::optional<Word> best;
  MeasureValue best_support = 0;
  for_each_ball_word(*group, radius, [&](const Word& raw) {
    if (raw.empty()) return false;
    Word w = engine.reduce(raw);
    if (w.empty() || !supported_in(engine, w, v, budget)) return false;
    MeasureValue s = 1 - fix_measure(engine, w, budget);
    if (s > best_support) {
      best_support = s;
      best = std::move(w);
    }
    return false;
  });
  if (!best) return std::nullopt;
  Rational bound(1, power(d, static_cast<unsigned>(v.level() + 1)));
  return SupportCandidate{Automorphism(group, *best), best_support, best_support >= bound};
}

bool support_inside(const Automorphism& g, const std::vector<Vertex>& target, std::size_t depth, std::size_t budget) {
  WordEngine engine(*g.group());
  const unsigned d = engine.degree();
  auto inside = [&](const Vertex& u) {
    return std::any_of(target.begin(), target.end(), [&](const Vertex& t) { return u.has_prefix(t); });
  };
  for (const auto& t : target) {
    if (t.level() > depth) throw std::invalid_argument("certificate depth below the target depth");
  }
  std::function<bool(const Vertex&, const Word&)> walk = [&](const Vertex& u, const Word& w) {
    if (inside(u) || w.empty()) return true;
    if (u.level() == depth) return engine.is_trivial(w, budget);
    for (unsigned x = 0; x < d; ++x) {
      Vertex child = u.child(static_cast<Letter>(x));
      if (inside(child)) continue;
      if (engine.image(w, static_cast<Letter>(x)) != x) return false;
      if (!walk(child, engine.section(w, static_cast<Letter>(x)))) return false;
    }
    return true;
  };
  return walk(Vertex(), g.word());
}

AnfApproximation anf_construct(const GroupPtr& group, const std::vector<Vertex>& target, const Rational& epsilon,
                               const AnfOptions& options) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const unsigned d = group->degree();
  for (const auto& v : target) {
    for (Letter x : v.letters()) {
      if (x >= d) throw std::invalid_argument("cylinder " + v.to_string() + " is not a vertex of the tree");
    }
  }

  std::vector<Vertex> cylinders(target);
  std::sort(cylinders.begin(), cylinders.end());
  cylinders.erase(std::unique(cylinders.begin(), cylinders.end()), cylinders.end());
  std::vector<Vertex> normalized;
  for (const auto& v : cylinders) {
    bool redundant = std::any_of(cylinders.begin(), cylinders.end(),
                                 [&](const Vertex& t) { return t != v && v.has_prefix(t); });
    if (!redundant) normalized.push_back(v);
  }
  std::size_t target_depth = 0;
  Rational target_mass = 0;
  for (const auto& v : normalized) {
    target_depth = std::max(target_depth, v.level());
    target_mass += Rational(1, power(d, static_cast<unsigned>(v.level())));
  }

  WordEngine engine(*group);
  AnfApproximation result{.target = normalized,
                          .target_mass = target_mass,
                          .epsilon = epsilon,
                          .element = Automorphism::identity(group),
                          .defect = target_mass};
  Word g;

  auto in_target = [&](const Vertex& u) {
    return std::any_of(normalized.begin(), normalized.end(), [&](const Vertex& t) { return u.has_prefix(t); });
  };
  auto meets_target = [&](const Vertex& u) {
    return std::any_of(normalized.begin(), normalized.end(),
                       [&](const Vertex& t) { return u.has_prefix(t) || t.has_prefix(u); });
  };

  // Maximal cylinders of A on which g acts trivially, found down to `depth`.
  auto cover = [&](std::size_t depth, std::vector<Vertex>& out) {
    std::function<bool(const Vertex&, const Word&)> walk = [&](const Vertex& u, const Word& w) {
      if (!meets_target(u)) return true;
      if (in_target(u) && engine.is_trivial(w, options.budget)) {
        if (out.size() == options.max_cylinders) return false;
        out.push_back(u);
        return true;
      }
      if (u.level() == depth) return true;
      for (unsigned x = 0; x < d; ++x) {
        if (!w.empty() && engine.image(w, static_cast<Letter>(x)) != x) continue;
        if (!walk(u.child(static_cast<Letter>(x)), w.empty() ? w : engine.section(w, static_cast<Letter>(x)))) {
          return false;
        }
      }
      return true;
    };
    return walk(Vertex(), g);
  };

  while (result.defect >= epsilon && result.rounds.size() < options.max_rounds) {
    AnfRound round;
    round.defect_before = result.defect;
    bool cover_met = false;
    for (std::size_t depth = target_depth; depth <= target_depth + options.extra_depth; ++depth) {
      std::vector<Vertex> found;
      if (!cover(depth, found)) break;
      round.depth = depth;
      round.cylinders = std::move(found);
      round.cover = 0;
      for (const auto& u : round.cylinders) round.cover += Rational(1, power(d, static_cast<unsigned>(u.level())));
      if (round.cover * (d + 1) >= round.defect_before * d) {
        cover_met = true;
        break;
      }
    }
    if (round.cylinders.empty()) {
      result.status = AnfStatus::stalled;
      result.rounds.push_back(std::move(round));
      break;
    }

    bool supports_met = true;
    for (const auto& u : round.cylinders) {
      auto found = support_search(group, u, options.radius, options.budget);
      if (!found) {
        result.status = AnfStatus::stalled;
        result.stalled_cylinder = u;
        break;
      }
      round.supports.push_back(found->support);
      supports_met = supports_met && found->meets_bound;
      g = engine.multiply(g, found->element.word());
    }
    round.defect_after = target_mass - (1 - fix_measure(engine, g, options.budget));
    if (result.status == AnfStatus::stalled) {
      // Factors found before the stall are kept.
      round.decay_ok = round.defect_after * (d + 1) <= round.defect_before * d;
      result.defect = round.defect_after;
      result.rounds.push_back(std::move(round));
      break;
    }

    Rational gained = std::accumulate(round.supports.begin(), round.supports.end(), Rational(0));
    if (round.defect_after != round.defect_before - gained) {
      throw std::logic_error("supports of the greedy factors are not disjoint");
    }
    round.bound_met = cover_met && supports_met;
    round.decay_ok = round.defect_after * (d + 1) <= round.defect_before * d;
    if (round.bound_met && !round.decay_ok) throw std::logic_error("greedy decay bound violated");
    result.defect = round.defect_after;
    result.rounds.push_back(std::move(round));
  }

  result.element = Automorphism(group, g);
  if (result.status != AnfStatus::stalled && result.defect >= epsilon) result.status = AnfStatus::round_limit;

  result.certificate_depth = target_depth;
  bool inside = support_inside(result.element, normalized, target_depth, options.budget);
  MeasureValue fresh = fix_measure(result.element, options.budget);
  result.verified = inside && target_mass - (1 - fresh) == result.defect;
  return result;
}

namespace {

class SymmetricGroup {
 public:
  explicit SymmetricGroup(unsigned n) : n_(n), lookup_(std::size_t{1} << (3 * n), -1) {
    std::vector<std::uint8_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      lookup_[pack(p)] = static_cast<std::int32_t>(perms_.size());
      perms_.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  std::size_t order() const { return perms_.size(); }
  const std::vector<std::uint8_t>& images(std::uint32_t i) const { return perms_[i]; }

  // (a * b)(x) = a(b(x))
  std::uint32_t multiply(std::uint32_t a, std::uint32_t b) const {
    const auto& pa = perms_[a];
    const auto& pb = perms_[b];
    std::uint32_t code = 0;
    for (unsigned x = 0; x < n_; ++x) code |= std::uint32_t{pa[pb[x]]} << (3 * x);
    return static_cast<std::uint32_t>(lookup_[code]);
  }

 private:
  static std::uint32_t pack(const std::vector<std::uint8_t>& p) {
    std::uint32_t code = 0;
    for (std::size_t x = 0; x < p.size(); ++x) code |= std::uint32_t{p[x]} << (3 * x);
    return code;
  }

  unsigned n_;
  std::vector<std::vector<std::uint8_t>> perms_;
  std::vector<std::int32_t> lookup_;
};

struct Subgroup {
  std::vector<std::uint32_t> generators;
  std::vector<std::uint32_t> elements;
  std::vector<std::uint64_t> bits;
};

Subgroup closure(const SymmetricGroup& sym, const Subgroup& base, std::uint32_t extra) {
  Subgroup out;
  out.generators = base.generators;
  out.generators.push_back(extra);
  out.bits.assign((sym.order() + 63) / 64, 0);
  auto add = [&](std::uint32_t e) {
    if (out.bits[e / 64] >> (e % 64) & 1) return;
    out.bits[e / 64] |= std::uint64_t{1} << (e % 64);
    out.elements.push_back(e);
  };
  for (auto e : base.elements) add(e);
  for (std::size_t i = 0; i < out.elements.size(); ++i) {
    for (auto gen : out.generators) add(sym.multiply(out.elements[i], gen));
  }
  return out;
}

bool transitive(const SymmetricGroup& sym, const Subgroup& h, unsigned n) {
  std::vector<bool> seen(n, false);
  std::vector<unsigned> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    unsigned x = stack.back();
    stack.pop_back();
    for (auto gen : h.generators) {
      unsigned y = sym.images(gen)[x];
      if (!seen[y]) {
        seen[y] = true;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count == n;
}

}  // namespace

LemmaReport lemma_subsets_verify(unsigned n_max) {
  if (n_max < 1 || n_max > 7) throw std::invalid_argument("n_max must be between 1 and 7");
  LemmaReport report;
  report.n_max = n_max;
  for (unsigned n = 1; n <= n_max; ++n) {
    SymmetricGroup sym(n);
    const std::uint32_t subsets = 1u << n;
    // image_of[p][A] = p(A) as a bit mask
    std::vector<std::vector<std::uint8_t>> image_of(sym.order(), std::vector<std::uint8_t>(subsets));
    for (std::uint32_t p = 0; p < sym.order(); ++p) {
      for (std::uint32_t a = 0; a < subsets; ++a) {
        std::uint32_t img = 0;
        for (unsigned x = 0; x < n; ++x) {
          if (a >> x & 1) img |= 1u << sym.images(p)[x];
        }
        image_of[p][a] = static_cast<std::uint8_t>(img);
      }
    }

    LemmaLevelStats stats;
    stats.n = n;
    Subgroup trivial;
    trivial.elements = {0};
    trivial.bits.assign((sym.order() + 63) / 64, 0);
    trivial.bits[0] = 1;
    std::set<std::vector<std::uint64_t>> seen{trivial.bits};
    std::deque<Subgroup> queue{trivial};

    auto check = [&](const Subgroup& h) {
      ++stats.subgroups;
      if (!transitive(sym, h, n)) return;
      ++stats.transitive_subgroups;
      for (std::uint32_t a = 1; a < subsets; ++a) {
        ++stats.subsets_checked;
        const int size = std::popcount(a);
        bool hypothesis = true;
        for (auto x : h.elements) {
          if (std::popcount(a ^ image_of[x][a]) > size) {
            hypothesis = false;
            break;
          }
        }
        if (!hypothesis) continue;
        ++stats.hypothesis_holds;
        if (2 * size > static_cast<int>(n)) continue;
        LemmaCounterexample bad;
        bad.n = n;
        for (auto gen : h.generators) {
          const auto& img = sym.images(gen);
          bad.generators.emplace_back(img.begin(), img.end());
        }
        for (unsigned x = 0; x < n; ++x) {
          if (a >> x & 1) bad.subset.push_back(x);
        }
        report.counterexamples.push_back(std::move(bad));
      }
    };

    // Every subgroup is reached from the trivial group by adjoining one element at a time;
    // one representative per left coset of H gives each join <H, x> once.
    while (!queue.empty()) {
      Subgroup h = std::move(queue.front());
      queue.pop_front();
      check(h);
      std::vector<bool> marked(sym.order(), false);
      for (auto e : h.elements) marked[e] = true;
      for (std::uint32_t x = 0; x < sym.order(); ++x) {
        if (marked[x]) continue;
        for (auto e : h.elements) marked[sym.multiply(x, e)] = true;
        Subgroup joined = closure(sym, h, x);
        if (seen.insert(joined.bits).second) queue.push_back(std::move(joined));
      }
    }
    report.levels.push_back(stats);
  }
  return report;
}

}  // namespace branchlab
