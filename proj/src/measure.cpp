#include "branchlab/measure.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace branchlab {

namespace {

// Solves matrix * x = rhs exactly; the matrix is square and nonsingular.
std::vector<Rational> solve(std::vector<std::vector<Rational>> matrix, std::vector<Rational> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && matrix[pivot][col] == 0) ++pivot;
    if (pivot == n) throw std::logic_error("singular fixed-point system");
    std::swap(matrix[pivot], matrix[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || matrix[row][col] == 0) continue;
      Rational factor = matrix[row][col] / matrix[col][col];
      for (std::size_t j = col; j < n; ++j) matrix[row][j] -= factor * matrix[col][j];
      rhs[row] -= factor * rhs[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / matrix[i][i];
  return x;
}

}  // namespace

FixSystem build_fix_system(const MinimalAutomaton& automaton) {
  const std::size_t n = automaton.size();
  const unsigned d = automaton.degree();
  FixSystem sys{automaton, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)),
                std::vector<FixStateKind>(n, FixStateKind::doomed), std::vector<MeasureValue>(n)};

  std::vector<std::vector<std::size_t>> predecessors(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& state = automaton.states()[s];
    for (unsigned x = 0; x < d; ++x) {
      if (state.perm(static_cast<Letter>(x)) != x) continue;
      sys.transition[s][state.next[x]] += Rational(1, d);
      predecessors[state.next[x]].push_back(s);
    }
  }

  auto identity = automaton.identity_state();
  if (!identity) return sys;  // no fixed-letter path ever reaches the identity: measure 0 everywhere

  // States that reach the identity through fixed letters; all others have measure zero.
  std::vector<bool> reaches(n, false);
  std::deque<std::size_t> queue{*identity};
  reaches[*identity] = true;
  while (!queue.empty()) {
    std::size_t t = queue.front();
    queue.pop_front();
    for (std::size_t s : predecessors[t]) {
      if (!reaches[s]) {
        reaches[s] = true;
        queue.push_back(s);
      }
    }
  }
  std::vector<std::size_t> transient;
  std::vector<std::size_t> position(n, SIZE_MAX);
  for (std::size_t s = 0; s < n; ++s) {
    if (s == *identity) {
      sys.kinds[s] = FixStateKind::trivial;
    } else if (reaches[s]) {
      sys.kinds[s] = FixStateKind::transient;
      position[s] = transient.size();
      transient.push_back(s);
    }
  }
  sys.solution[*identity] = 1;

  // (I - A_TT) m_T = A_T,identity
  const std::size_t m = transient.size();
  std::vector<std::vector<Rational>> lhs(m, std::vector<Rational>(m));
  std::vector<Rational> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t s = transient[i];
    lhs[i][i] = 1;
    for (std::size_t t = 0; t < n; ++t) {
      if (sys.transition[s][t] == 0) continue;
      if (t == *identity) {
        rhs[i] += sys.transition[s][t];
      } else if (position[t] != SIZE_MAX) {
        lhs[i][position[t]] -= sys.transition[s][t];
      }
    }
  }
  auto values = solve(std::move(lhs), std::move(rhs));
  for (std::size_t i = 0; i < m; ++i) sys.solution[transient[i]] = values[i];
  return sys;
}

MeasureValue fix_measure(WordEngine& engine, const Word& w, std::size_t budget) {
  if (w.empty()) return 1;
  return build_fix_system(minimize(engine, w, budget)).solution[0];
}

MeasureValue fix_measure(const Automorphism& g, std::size_t budget) {
  WordEngine engine(*g.group());
  return fix_measure(engine, g.word(), budget);
}

MeasureValue supp_measure(const Automorphism& g, std::size_t budget) { return 1 - fix_measure(g, budget); }

LevelCounts level_counts(WordEngine& engine, const Word& w, std::size_t max_level, std::size_t budget,
                         bool with_interior) {
  const unsigned d = engine.degree();
  LevelCounts counts;
  std::map<Word, Integer> layer{{w, Integer(1)}};
  for (std::size_t level = 0;; ++level) {
    Integer fixed = 0;
    Integer interior = 0;
    for (const auto& [word, mult] : layer) {
      fixed += mult;
      if (with_interior && engine.is_trivial(word, budget)) interior += mult;
    }
    counts.fixed.push_back(fixed);
    if (with_interior) counts.interior.push_back(interior);
    if (level == max_level) break;

    std::map<Word, Integer> next;
    for (const auto& [word, mult] : layer) {
      if (word.empty()) {
        next[word] += mult * d;
        continue;
      }
      for (unsigned x = 0; x < d; ++x) {
        if (engine.image(word, static_cast<Letter>(x)) == x) next[engine.section(word, static_cast<Letter>(x))] += mult;
      }
    }
    layer = std::move(next);
  }
  return counts;
}

MeasureValue fix_measure_level(const Automorphism& g, std::size_t k) {
  WordEngine engine(*g.group());
  auto counts = level_counts(engine, g.word(), k, kDefaultBudget, false);
  return Rational(counts.fixed.back(), power(engine.degree(), static_cast<unsigned>(k)));
}

std::vector<Vertex> fix_interior(const Automorphism& g, std::size_t k, std::size_t budget) {
  WordEngine engine(*g.group());
  std::vector<Vertex> out;
  std::vector<std::pair<Vertex, Word>> stack{{Vertex(), g.word()}};
  while (!stack.empty()) {
    auto [v, w] = std::move(stack.back());
    stack.pop_back();
    if (v.level() == k) {
      if (engine.is_trivial(w, budget)) out.push_back(std::move(v));
      continue;
    }
    for (unsigned x = 0; x < engine.degree(); ++x) {
      if (!w.empty() && engine.image(w, static_cast<Letter>(x)) != x) continue;
      stack.emplace_back(v.child(static_cast<Letter>(x)), w.empty() ? w : engine.section(w, static_cast<Letter>(x)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LevelBound> level_bounds(const Automorphism& g, std::size_t max_level, std::size_t budget) {
  WordEngine engine(*g.group());
  auto counts = level_counts(engine, g.word(), max_level, budget);
  std::vector<LevelBound> out;
  for (std::size_t k = 0; k <= max_level; ++k) {
    Integer total = power(engine.degree(), static_cast<unsigned>(k));
    out.push_back({k, Rational(counts.interior[k], total), Rational(counts.fixed[k], total)});
  }
  return out;
}

bool is_positive_semidefinite(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("matrix is not square");
    for (std::size_t j = 0; j < i; ++j) {
      if (a[i][j] != a[j][i]) return false;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] < 0) return false;
    if (a[k][k] == 0) {
      for (std::size_t j = k + 1; j < n; ++j) {
        if (a[k][j] != 0) return false;
      }
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k] == 0) continue;
      Rational factor = a[i][k] / a[k][k];
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= factor * a[k][j];
    }
  }
  return true;
}

GramReport gram_psd_check(const std::vector<Automorphism>& elements, std::size_t budget) {
  GramReport report;
  const std::size_t n = elements.size();
  report.gram.assign(n, std::vector<Rational>(n));
  if (n == 0) {
    report.positive_semidefinite = true;
    return report;
  }
  WordEngine engine(*elements.front().group());
  for (const auto& g : elements) {
    if (g.group() != elements.front().group()) throw std::invalid_argument("elements over different groups");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Word w = engine.multiply(elements[i].word(), engine.inverse(elements[j].word()));
      report.gram[i][j] = fix_measure(engine, w, budget);
    }
  }
  report.positive_semidefinite = is_positive_semidefinite(report.gram);
  return report;
}

}  // namespace branchlab
