#include "branchlab/cli.hpp"

#include "branchlab/catalog.hpp"
#include "branchlab/diag.hpp"
#include "branchlab/dsl.hpp"
#include "branchlab/measure.hpp"
#include "branchlab/nonfree.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace branchlab {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Json integer_json(const Integer& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

Json rational_json(const Rational& q) {
  return Json{{"num", integer_json(numerator_of(q))}, {"den", integer_json(denominator_of(q))}};
}

bool is_rational(const Json& j) { return j.is_object() && j.size() == 2 && j.contains("num") && j.contains("den"); }

// Rationals become "p/q" strings; everything else is kept.
Json flatten_rationals(const Json& j) {
  if (is_rational(j)) {
    std::string num = j["num"].is_string() ? j["num"].get<std::string>() : j["num"].dump();
    std::string den = j["den"].is_string() ? j["den"].get<std::string>() : j["den"].dump();
    return den == "1" ? num : num + "/" + den;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& x : j) out.push_back(flatten_rationals(x));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) out[k] = flatten_rationals(v);
    return out;
  }
  return j;
}

std::string plain(const Json& j) {
  Json flat = flatten_rationals(j);
  if (flat.is_string()) return flat.get<std::string>();
  if (flat.is_null()) return "";
  return flat.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Result {
  Json body = Json::object();
  std::optional<Table> table;
  bool failed = false;
  std::string failure;
};

struct Settings {
  std::string group;
  std::string format = "json";
  std::size_t budget = kDefaultBudget;
  std::uint64_t seed = 1;
  std::string element;
  std::string elements;
  std::string vertex;
  std::string set;
  std::string sets;
  std::string tuple;
  std::string eps = "1/8";
  std::string file;
  std::string show;
  std::size_t level = 1;
  std::size_t depth = 0;
  std::size_t radius = 4;
  std::size_t n = 2;
  std::size_t n_max = 2;
  std::size_t rounds = 8;
  std::size_t count = 5;
  std::size_t component = 0;
  std::size_t j = 1;
  bool tower = false;
  bool sum = false;
};

GroupPtr load_group(const std::string& source) {
  if (source.empty()) throw UsageError("--group is required");
  if (source.ends_with(".grp") || source.find('/') != std::string::npos) {
    std::ifstream in(source);
    if (!in) throw UsageError("cannot read group file '" + source + "'");
    std::stringstream text;
    text << in.rdbuf();
    try {
      return parse_group(text.str());
    } catch (const ParseError& e) {
      throw UsageError(source + ":" + e.what());
    }
  }
  return load(source).group;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

Vertex vertex_arg(const std::string& text, unsigned degree) {
  return text == "root" ? Vertex() : Vertex::parse(text, degree);
}

std::vector<Vertex> vertex_list(const std::string& text, unsigned degree) {
  std::vector<Vertex> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw UsageError("empty vertex in list '" + text + "' (write the root as 'root')");
    out.push_back(vertex_arg(part, degree));
  }
  return out;
}

Json vertex_names(const std::vector<Vertex>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(v.to_string());
  return out;
}

Json tuple_json(const TupleClass& t, std::size_t level, unsigned degree) {
  Json out = Json::array();
  for (auto v : t) out.push_back(Vertex::from_index(v, level, degree).to_string());
  return out;
}

std::string rstr(const Rational& q) { return to_string(q); }

Automorphism element_arg(const GroupPtr& group, const std::string& text) {
  if (text.empty()) throw UsageError("--element is required");
  return parse_word(group, text);
}

// Uniform length in [0, radius], then letters avoiding immediate cancellation.
Word random_word(const GroupDef& group, std::size_t radius, std::mt19937_64& rng) {
  auto table = group.atoms();
  auto symbols = ball_alphabet(group);
  Word w;
  if (symbols.empty()) return w;
  std::size_t length = std::uniform_int_distribution<std::size_t>(0, radius)(rng);
  while (w.size() < length) {
    Symbol s = symbols[std::uniform_int_distribution<std::size_t>(0, symbols.size() - 1)(rng)];
    if (!w.empty() && (w.back() == s.inverse() || (w.back() == s && (*table)[s.atom()].involution))) continue;
    w.push_back(s);
  }
  return w;
}

// ---------------------------------------------------------------- subcommands

Result cmd_catalog(const Settings& s) {
  Result r;
  if (s.show.empty()) {
    Json names = Json::array();
    Table t{{"name"}, {}};
    for (const auto& name : catalog_names()) {
      names.push_back(name);
      t.rows.push_back({name});
    }
    r.body["groups"] = names;
    r.table = t;
    return r;
  }
  auto entry = load(s.show);
  Json gens = Json::array();
  for (const auto& g : entry.group->generators()) gens.push_back(g.name);
  r.body["name"] = entry.name;
  r.body["degree"] = entry.group->degree();
  r.body["generators"] = gens;
  r.body["level_transitive"] = entry.level_transitive;
  r.body["weakly_branch_evidence_depth"] = entry.weakly_branch_evidence_depth;
  r.body["relations"] = entry.relations;
  r.body["definition"] = emit_group(*entry.group);
  return r;
}

Result cmd_eval(const Settings& s, const GroupPtr& group) {
  Result r;
  auto g = element_arg(group, s.element);
  r.body["element"] = s.element;
  r.body["normal_form"] = g.to_string();
  r.body["root_permutation"] = root_permutation(g).cycle_string();
  if (!s.vertex.empty()) {
    Vertex v = vertex_arg(s.vertex, group->degree());
    r.body["vertex"] = v.to_string();
    r.body["image"] = apply(g, v).to_string();
  }
  if (s.depth > 0) {
    Json entries = Json::object();
    Table t{{"vertex", "permutation"}, {}};
    Portrait pic = portrait(g, s.depth);
    for (const auto& [v, p] : pic.entries()) {
      entries[v.to_string()] = p.cycle_string();
      t.rows.push_back({v.to_string(), p.cycle_string()});
    }
    r.body["portrait_depth"] = s.depth;
    r.body["portrait"] = entries;
    r.table = t;
  }
  return r;
}

Result cmd_section(const Settings& s, const GroupPtr& group) {
  Result r;
  auto g = element_arg(group, s.element);
  Vertex v = vertex_arg(s.vertex.empty() ? "root" : s.vertex, group->degree());
  auto h = section(g, v);
  r.body["element"] = s.element;
  r.body["vertex"] = v.to_string();
  r.body["section"] = h.to_string();
  r.body["trivial"] = is_trivial(h, s.budget);
  return r;
}

Result cmd_trivial(const Settings& s, const GroupPtr& group) {
  Result r;
  auto g = element_arg(group, s.element);
  r.body["trivial"] = is_trivial(g, s.budget);
  r.body["element"] = s.element;
  r.body["normal_form"] = g.to_string();
  return r;
}

Result cmd_fix_measure(const Settings& s, const GroupPtr& group) {
  Result r;
  auto g = element_arg(group, s.element);
  auto automaton = minimize(g, s.budget);
  auto value = build_fix_system(automaton).solution[0];
  r.body["fix_measure"] = rational_json(value);
  r.body["supp_measure"] = rational_json(1 - value);
  r.body["element"] = s.element;
  r.body["automaton_states"] = automaton.size();
  if (s.depth > 0) {
    Json bounds = Json::array();
    Table t{{"level", "lower", "upper"}, {}};
    for (const auto& b : level_bounds(g, s.depth, s.budget)) {
      bounds.push_back({{"level", b.level}, {"lower", rational_json(b.lower)}, {"upper", rational_json(b.upper)}});
      t.rows.push_back({std::to_string(b.level), rstr(b.lower), rstr(b.upper)});
    }
    r.body["level_bounds"] = bounds;
    r.table = t;
  }
  return r;
}

Result component_intervals(const Settings& s, const GroupPtr& group, bool single) {
  Result r;
  auto g = element_arg(group, s.element);
  const std::size_t depth = std::max(s.depth, s.level);
  auto partition = orbits(group, s.n, s.level, s.budget);
  if (single && s.component >= partition.orbits.size()) {
    throw UsageError("component " + std::to_string(s.component) + " does not exist (level has " +
                     std::to_string(partition.orbits.size()) + ")");
  }
  auto intervals = char_intervals(partition, g, depth, s.budget);
  r.body["element"] = s.element;
  r.body["n"] = s.n;
  r.body["level"] = s.level;
  r.body["depth"] = depth;
  Json comps = Json::array();
  Table t{{"component", "element", "lower", "upper"}, {}};
  for (std::size_t o = 0; o < intervals.size(); ++o) {
    if (single && o != s.component) continue;
    comps.push_back({{"id", o},
                     {"representative", tuple_json(partition.representative(o), s.level, group->degree())},
                     {"weight", rational_json(orbit_weight(partition, o))},
                     {"lower", rational_json(intervals[o].lower)},
                     {"upper", rational_json(intervals[o].upper)}});
    t.rows.push_back({std::to_string(o), s.element, rstr(intervals[o].lower), rstr(intervals[o].upper)});
  }
  r.body["components"] = comps;
  if (s.sum) {
    auto check = char_sum_check(group, s.n, g, s.level, depth, s.budget);
    r.body["sum_check"] = {{"lower", rational_json(check.lower)},
                           {"exact", rational_json(check.exact)},
                           {"upper", rational_json(check.upper)},
                           {"holds", check.holds}};
    if (!check.holds) {
      r.failed = true;
      r.failure = "weighted interval sum does not bracket the exact mass";
    }
  }
  r.table = t;
  return r;
}

Result cmd_char(const Settings& s, const GroupPtr& group, bool component_given) {
  if (component_given) return component_intervals(s, group, true);
  Result r;
  auto g = element_arg(group, s.element);
  r.body["char"] = rational_json(char_value(g, s.budget));
  r.body["element"] = s.element;
  return r;
}

Result cmd_psd(const Settings& s, const GroupPtr& group) {
  Result r;
  std::vector<Automorphism> elements;
  if (!s.elements.empty()) {
    for (const auto& w : split(s.elements, ',')) elements.push_back(element_arg(group, w));
  } else {
    std::mt19937_64 rng(s.seed);
    for (std::size_t i = 0; i < s.count; ++i) elements.emplace_back(group, random_word(*group, s.radius, rng));
  }
  auto report = gram_psd_check(elements, s.budget);
  Json names = Json::array();
  for (const auto& g : elements) names.push_back(g.to_string());
  Json gram = Json::array();
  Table t{{"row", "column", "value"}, {}};
  for (std::size_t i = 0; i < report.gram.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < report.gram.size(); ++k) {
      row.push_back(rational_json(report.gram[i][k]));
      t.rows.push_back({std::to_string(i), std::to_string(k), rstr(report.gram[i][k])});
    }
    gram.push_back(row);
  }
  r.body["positive_semidefinite"] = report.positive_semidefinite;
  r.body["elements"] = names;
  r.body["gram"] = gram;
  r.table = t;
  if (!report.positive_semidefinite) {
    r.failed = true;
    r.failure = "Gram matrix is not positive semidefinite";
  }
  return r;
}

Result cmd_tnf(const Settings& s, const GroupPtr& group) {
  Result r;
  auto cert = tnf_certificate(group, s.level, s.radius, s.budget);
  bool valid = validate_tnf(cert, s.budget);
  r.body["achieved"] = cert.achieved;
  r.body["level"] = cert.level;
  r.body["radius_searched"] = cert.radius_searched;
  r.body["minimal_radius"] = cert.minimal_radius ? Json(*cert.minimal_radius) : Json();
  r.body["atoms"] = cert.atoms;
  r.body["words_examined"] = cert.words_examined;
  Json entries = Json::array();
  Table t{{"element", "interior"}, {}};
  for (const auto& e : cert.entries) {
    entries.push_back({{"element", e.element.to_string()}, {"interior", vertex_names(e.interior)}});
    std::string joined;
    for (const auto& v : e.interior) joined += (joined.empty() ? "" : " ") + v.to_string();
    t.rows.push_back({e.element.to_string(), joined});
  }
  r.body["entries"] = entries;
  r.body["valid"] = valid;
  r.table = t;
  if (!valid) {
    r.failed = true;
    r.failure = "certificate failed re-validation";
  } else if (!cert.achieved) {
    r.failed = true;
    r.failure = "no certificate within radius " + std::to_string(s.radius);
  }
  return r;
}

Result cmd_anf(const Settings& s, const GroupPtr& group) {
  Result r;
  Rational eps;
  try {
    eps = parse_rational(s.eps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--eps: ") + e.what());
  }
  AnfOptions options;
  options.radius = s.radius;
  options.max_rounds = s.rounds;
  options.budget = s.budget;
  auto result = anf_construct(group, vertex_list(s.set, group->degree()), eps, options);
  static const char* names[] = {"achieved", "stalled", "round-limit"};
  r.body["status"] = names[static_cast<int>(result.status)];
  r.body["element"] = result.element.to_string();
  r.body["defect"] = rational_json(result.defect);
  r.body["epsilon"] = rational_json(result.epsilon);
  r.body["target"] = vertex_names(result.target);
  r.body["target_mass"] = rational_json(result.target_mass);
  r.body["verified"] = result.verified;
  r.body["certificate_depth"] = result.certificate_depth;
  r.body["stalled_cylinder"] = result.stalled_cylinder ? Json(result.stalled_cylinder->to_string()) : Json();
  Json rounds = Json::array();
  Table t{{"round", "depth", "cylinders", "cover", "defect_before", "defect_after", "bound_met", "decay_ok"}, {}};
  for (std::size_t i = 0; i < result.rounds.size(); ++i) {
    const auto& rd = result.rounds[i];
    Json supports = Json::array();
    for (const auto& x : rd.supports) supports.push_back(rational_json(x));
    rounds.push_back({{"depth", rd.depth},
                      {"cylinders", vertex_names(rd.cylinders)},
                      {"cover", rational_json(rd.cover)},
                      {"supports", supports},
                      {"defect_before", rational_json(rd.defect_before)},
                      {"defect_after", rational_json(rd.defect_after)},
                      {"bound_met", rd.bound_met},
                      {"decay_ok", rd.decay_ok}});
    t.rows.push_back({std::to_string(i + 1), std::to_string(rd.depth), std::to_string(rd.cylinders.size()),
                      rstr(rd.cover), rstr(rd.defect_before), rstr(rd.defect_after), rd.bound_met ? "true" : "false",
                      rd.decay_ok ? "true" : "false"});
  }
  r.body["rounds"] = rounds;
  r.table = t;
  if (result.status != AnfStatus::achieved || !result.verified) {
    r.failed = true;
    r.failure = result.status == AnfStatus::stalled
                    ? "stalled: no supported element found" +
                          (result.stalled_cylinder ? " in cylinder " + result.stalled_cylinder->to_string() : "")
                    : (!result.verified ? "result failed re-verification" : "defect not below epsilon");
  }
  return r;
}

Result cmd_lemma(const Settings& s) {
  Result r;
  if (s.n_max > 7) throw UsageError("--n-max must be at most 7");
  auto report = lemma_subsets_verify(static_cast<unsigned>(s.n_max));
  Json bad = Json::array();
  for (const auto& c : report.counterexamples) {
    bad.push_back({{"n", c.n}, {"generators", c.generators}, {"subset", c.subset}});
  }
  r.body["counterexamples"] = bad;
  r.body["n_max"] = report.n_max;
  Json levels = Json::array();
  Table t{{"n", "subgroups", "transitive_subgroups", "subsets_checked", "hypothesis_holds"}, {}};
  for (const auto& l : report.levels) {
    levels.push_back({{"n", l.n},
                      {"subgroups", l.subgroups},
                      {"transitive_subgroups", l.transitive_subgroups},
                      {"subsets_checked", l.subsets_checked},
                      {"hypothesis_holds", l.hypothesis_holds}});
    t.rows.push_back({std::to_string(l.n), std::to_string(l.subgroups), std::to_string(l.transitive_subgroups),
                      std::to_string(l.subsets_checked), std::to_string(l.hypothesis_holds)});
  }
  r.body["levels"] = levels;
  r.table = t;
  if (!report.counterexamples.empty()) {
    r.failed = true;
    r.failure = "counterexamples found";
  }
  return r;
}

Result cmd_orbits(const Settings& s, const GroupPtr& group) {
  Result r;
  auto p = orbits(group, s.n, s.level, s.budget);
  const unsigned d = group->degree();
  r.body["level"] = s.level;
  r.body["n"] = s.n;
  r.body["orbit_count"] = p.orbits.size();
  Json list = Json::array();
  Table t{{"id", "size", "representative", "weight"}, {}};
  for (std::size_t o = 0; o < p.orbits.size(); ++o) {
    list.push_back({{"id", o},
                    {"size", p.orbits[o].size()},
                    {"representative", tuple_json(p.representative(o), s.level, d)},
                    {"weight", rational_json(orbit_weight(p, o))}});
    t.rows.push_back({std::to_string(o), std::to_string(p.orbits[o].size()),
                      tuple_string(p.representative(o), s.level, d), rstr(orbit_weight(p, o))});
  }
  r.body["orbits"] = list;
  r.table = t;
  return r;
}

Result cmd_components(const Settings& s, const GroupPtr& group) {
  Result r;
  auto tower = component_tower(group, s.n, s.level, s.budget);
  const unsigned d = group->degree();
  r.body["n"] = s.n;
  r.body["consistent"] = tower.consistent;
  Json levels = Json::array();
  Table t{{"level", "id", "parent", "size", "weight"}, {}};
  for (std::size_t i = 0; i < tower.levels.size(); ++i) {
    const auto& lvl = tower.levels[i];
    if (!s.tower && i + 1 != tower.levels.size()) continue;
    Json comps = Json::array();
    for (const auto& node : lvl.nodes) {
      comps.push_back({{"id", node.orbit},
                       {"parent", node.parent ? Json(*node.parent) : Json()},
                       {"size", node.size},
                       {"weight", rational_json(node.weight)},
                       {"representative", tuple_json(lvl.partition.representative(node.orbit), node.level, d)}});
      t.rows.push_back({std::to_string(node.level), std::to_string(node.orbit),
                        node.parent ? std::to_string(*node.parent) : "", std::to_string(node.size),
                        rstr(node.weight)});
    }
    levels.push_back({{"level", lvl.partition.level},
                      {"count", lvl.nodes.size()},
                      {"total_weight", rational_json(lvl.total_weight)},
                      {"excluded_mass", rational_json(lvl.excluded_mass)},
                      {"components", comps}});
  }
  r.body["levels"] = levels;
  r.table = t;
  if (!tower.consistent) {
    r.failed = true;
    r.failure = "component tower is inconsistent";
  }
  return r;
}

Result cmd_separate(const Settings& s, const GroupPtr& group) {
  Result r;
  const std::size_t depth = std::max(s.depth, s.level);
  auto report = distinctness_search(group, s.n_max, s.level, depth, s.radius, s.budget);
  const unsigned d = group->degree();
  r.body["level"] = report.level;
  r.body["depth"] = report.depth;
  r.body["radius"] = report.radius;
  Json comps = Json::array();
  for (std::size_t i = 0; i < report.components.size(); ++i) {
    const auto& c = report.components[i];
    comps.push_back({{"index", i}, {"n", c.n}, {"orbit", c.orbit}, {"representative", tuple_json(c.representative, report.level, d)}});
  }
  r.body["components"] = comps;
  Json pairs = Json::array();
  Table t{{"first", "second", "witness", "first_lower", "first_upper", "second_lower", "second_upper"}, {}};
  for (const auto& p : report.pairs) {
    Json entry{{"first", p.first}, {"second", p.second}, {"separated", p.witness.has_value()}};
    entry["witness"] = p.witness ? Json(p.witness->to_string()) : Json();
    if (p.witness) {
      entry["first_interval"] = {{"lower", rational_json(p.first_interval.lower)},
                                 {"upper", rational_json(p.first_interval.upper)}};
      entry["second_interval"] = {{"lower", rational_json(p.second_interval.lower)},
                                  {"upper", rational_json(p.second_interval.upper)}};
      t.rows.push_back({std::to_string(p.first), std::to_string(p.second), p.witness->to_string(),
                        rstr(p.first_interval.lower), rstr(p.first_interval.upper), rstr(p.second_interval.lower),
                        rstr(p.second_interval.upper)});
    } else {
      t.rows.push_back({std::to_string(p.first), std::to_string(p.second), "", "", "", "", ""});
    }
    pairs.push_back(entry);
  }
  r.body["pairs"] = pairs;
  r.body["unresolved"] = report.unresolved;
  r.table = t;
  if (report.unresolved > 0) {
    r.failed = true;
    r.failure = std::to_string(report.unresolved) + " component pairs not separated";
  }
  return r;
}

Result cmd_sym(const Settings& s, const GroupPtr& group) {
  Result r;
  std::vector<std::vector<Vertex>> sets;
  for (const auto& part : split(s.sets, ';')) sets.push_back(vertex_list(part, group->degree()));
  auto check = symmetrization_identity_check(sets, s.budget);
  r.body["holds"] = check.holds;
  r.body["lhs_size"] = check.lhs_size;
  r.body["rhs_size"] = check.rhs_size;
  if (!check.holds) {
    r.failed = true;
    r.failure = "symmetrization identity fails";
  }
  return r;
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  std::string out;
  for (auto b : bits) out += b ? '1' : '0';
  return out;
}

Result cmd_r(const Settings& s) {
  Result r;
  if (!s.tuple.empty()) {
    auto bits = r_invariant(vertex_list(s.tuple, 2));
    r.body["tuple"] = s.tuple;
    r.body["r"] = bits_string(bits);
    return r;
  }
  auto report = r_invariance_check(s.j, s.n, s.budget);
  r.body["invariant"] = report.invariant;
  r.body["constant_on_orbits"] = report.constant_on_orbits;
  r.body["j"] = report.j;
  r.body["n"] = report.n;
  r.body["generators"] = report.generators;
  r.body["tuples_checked"] = report.tuples_checked;
  r.body["orbit_count"] = report.orbit_count;
  Json classes = Json::array();
  Table t{{"r", "mass"}, {}};
  for (const auto& [bits, mass] : report.class_masses) {
    classes.push_back({{"r", bits_string(bits)}, {"mass", rational_json(mass)}});
    t.rows.push_back({bits_string(bits), rstr(mass)});
  }
  r.body["classes"] = classes;
  r.table = t;
  if (!report.invariant || !report.constant_on_orbits) {
    r.failed = true;
    r.failure = "r is not invariant";
  }
  return r;
}

Result cmd_parse(const Settings& s) {
  Result r;
  std::string source = s.file.empty() ? s.group : s.file;
  if (source.empty()) throw UsageError("give a .grp file with --file (or a catalog name with --group)");
  GroupPtr group;
  if (!s.file.empty()) {
    std::ifstream in(s.file);
    if (!in) throw UsageError("cannot read group file '" + s.file + "'");
    std::stringstream text;
    text << in.rdbuf();
    try {
      group = parse_group(text.str());
    } catch (const ParseError& e) {
      throw UsageError(s.file + ":" + e.what());
    }
  } else {
    group = load_group(s.group);
  }
  Json gens = Json::array();
  for (const auto& g : group->generators()) gens.push_back(g.name);
  r.body["degree"] = group->degree();
  r.body["generators"] = gens;
  r.body["definition"] = emit_group(*group);
  return r;
}

void emit(const Result& result, const Json& config, const std::string& format, std::ostream& out) {
  if (format == "json") {
    Json body = result.body;
    body["schema"] = "branchlab/1";
    body["config"] = config;
    out << body.dump() << "\n";
  } else if (format == "csv") {
    if (result.table) {
      for (std::size_t i = 0; i < result.table->columns.size(); ++i) {
        out << (i ? "," : "") << csv_field(result.table->columns[i]);
      }
      out << "\n";
      for (const auto& row : result.table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << "\n";
      }
    } else {
      out << "key,value\n";
      for (const auto& [k, v] : result.body.items()) out << csv_field(k) << "," << csv_field(plain(v)) << "\n";
    }
  } else {
    for (const auto& [k, v] : result.body.items()) {
      std::string value = plain(v);
      if (value.find('\n') != std::string::npos) {
        out << k << ":\n" << value;
        if (!value.ends_with("\n")) out << "\n";
      } else {
        out << k << ": " << value << "\n";
      }
    }
  }
}

std::size_t default_budget() {
  const char* env = std::getenv("BRANCHLAB_BUDGET");
  if (!env || !*env) return kDefaultBudget;
  char* end = nullptr;
  unsigned long long value = std::strtoull(env, &end, 10);
  if (*end != '\0' || value == 0 || env[0] == '-') {
    throw UsageError(std::string("BRANCHLAB_BUDGET must be a positive integer, got '") + env + "'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  try {
    s.budget = default_budget();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Exact computations with groups acting on regular rooted trees", "branchlab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto common = [&](CLI::App* sub, bool needs_group) {
    auto* g = sub->add_option("--group", s.group, "Catalog name or path to a .grp file");
    if (needs_group) g->required();
    sub->add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--budget", s.budget, "Closure budget (states)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", s.seed, "Seed for randomized choices");
  };

  auto* catalog = app.add_subcommand("catalog", "List catalog groups or show one");
  common(catalog, false);
  catalog->add_option("--show", s.show, "Catalog name to describe");

  auto* eval = app.add_subcommand("eval", "Normal form, root permutation, vertex image and portrait");
  common(eval, true);
  eval->add_option("--element", s.element, "Element word, e.g. a*d*a or ada")->required();
  eval->add_option("--vertex", s.vertex, "Vertex to act on (base-36 letters)");
  eval->add_option("--depth", s.depth, "Portrait depth");

  auto* sec = app.add_subcommand("section", "Section of an element at a vertex");
  common(sec, true);
  sec->add_option("--element", s.element, "Element word, e.g. a*d*a or ada")->required();
  sec->add_option("--vertex", s.vertex, "Vertex as a letter string (root for the root)")->required();

  auto* triv = app.add_subcommand("trivial", "Decide whether a word is the identity");
  common(triv, true);
  triv->add_option("--element", s.element, "Element word, e.g. a*d*a or ada")->required();

  auto* fix = app.add_subcommand("fix-measure", "Exact measure of the fixed-point set");
  common(fix, true);
  fix->add_option("--element", s.element, "Element word, e.g. a*d*a or ada")->required();
  fix->add_option("--level", s.depth, "Also report per-level bounds up to this level");

  auto* chr = app.add_subcommand("char", "Character value, or a component character interval");
  common(chr, true);
  chr->add_option("--element", s.element, "Element word, e.g. a*d*a or ada")->required();
  auto* comp_opt = chr->add_option("--component", s.component, "Component id at --level");
  chr->add_option("--n", s.n, "Tuple size");
  chr->add_option("--level", s.level, "Tree level");
  chr->add_option("--depth", s.depth, "Depth used for the interval bounds");

  auto* psd = app.add_subcommand("psd-check", "Positive semidefiniteness of the character Gram matrix");
  common(psd, true);
  psd->add_option("--elements", s.elements, "Comma-separated words (default: random ball words)");
  psd->add_option("--count", s.count, "Number of random words");
  psd->add_option("--radius", s.radius, "Ball radius for random words");

  auto* tnf = app.add_subcommand("tnf-cert", "Fix-interior separation certificate for a level");
  common(tnf, true);
  tnf->add_option("--level", s.level, "Tree level")->check(CLI::PositiveNumber);
  tnf->add_option("--radius", s.radius, "Word length bound");

  auto* anf = app.add_subcommand("anf", "Approximate a clopen set by a support");
  common(anf, true);
  anf->add_option("--set", s.set, "Comma-separated cylinders ('root' for the whole boundary)");
  anf->add_option("--eps", s.eps, "Target defect p/q");
  anf->add_option("--radius", s.radius, "Ball radius for supported elements");
  anf->add_option("--rounds", s.rounds, "Maximum greedy rounds");

  auto* lemma = app.add_subcommand("lemma-check", "Subset lemma for transitive permutation groups");
  common(lemma, false);
  lemma->add_option("--n-max", s.n_max, "Largest n to check")->check(CLI::Range(1, 7));

  auto* orb = app.add_subcommand("orbits", "Orbits on unordered n-tuples of distinct level vertices");
  common(orb, true);
  orb->add_option("--n", s.n, "Tuple size")->check(CLI::PositiveNumber);
  orb->add_option("--level", s.level, "Tree level");

  auto* comps = app.add_subcommand("components", "Component tower up to --level");
  common(comps, true);
  comps->add_option("--n", s.n, "Tuple size")->check(CLI::PositiveNumber);
  comps->add_option("--level", s.level, "Tree level");
  comps->add_flag("--tower", s.tower, "Report every level, not only the last");

  auto* civ = app.add_subcommand("char-interval", "Character intervals for every component");
  common(civ, true);
  civ->add_option("--element", s.element, "Element word, e.g. a*d*a or ada")->required();
  civ->add_option("--n", s.n, "Tuple size")->check(CLI::PositiveNumber);
  civ->add_option("--level", s.level, "Tree level");
  civ->add_option("--depth", s.depth, "Depth used for the interval bounds");
  civ->add_flag("--sum", s.sum, "Also check the weighted sum rule");

  auto* sep = app.add_subcommand("separate", "Separate component characters by ball words");
  common(sep, true);
  sep->add_option("--n-max", s.n_max, "Largest n to check")->check(CLI::PositiveNumber);
  sep->add_option("--level", s.level, "Tree level");
  sep->add_option("--depth", s.depth, "Depth used for the interval bounds");
  sep->add_option("--radius", s.radius, "Word length bound");

  auto* sym = app.add_subcommand("sym-check", "Symmetrization identity for disjoint vertex sets");
  common(sym, true);
  sym->add_option("--sets", s.sets, "Sets separated by ';', vertices by ','")->required();

  auto* rinv = app.add_subcommand("r-invariant", "Switch-group invariant r");
  common(rinv, false);
  rinv->add_option("--tuple", s.tuple, "Compute r of one tuple of level-2j vertices");
  rinv->add_option("--j", s.j, "Half of the even level 2j")->check(CLI::Range(1, 6));
  rinv->add_option("--n", s.n, "Tuple size")->check(CLI::PositiveNumber);

  auto* parse = app.add_subcommand("parse", "Parse a .grp file and print its canonical form");
  common(parse, false);
  parse->add_option("--file", s.file, "Path to a .grp file");

  std::vector<std::string> argv_store{"branchlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Json config{{"command", name}, {"group", s.group.empty() ? Json() : Json(s.group)}, {"budget", s.budget},
              {"seed", s.seed}};

  try {
    Result result;
    auto group = [&] { return load_group(s.group); };
    if (name == "catalog") result = cmd_catalog(s);
    else if (name == "eval") result = cmd_eval(s, group());
    else if (name == "section") result = cmd_section(s, group());
    else if (name == "trivial") result = cmd_trivial(s, group());
    else if (name == "fix-measure") result = cmd_fix_measure(s, group());
    else if (name == "char") result = cmd_char(s, group(), comp_opt->count() > 0);
    else if (name == "psd-check") result = cmd_psd(s, group());
    else if (name == "tnf-cert") result = cmd_tnf(s, group());
    else if (name == "anf") result = cmd_anf(s, group());
    else if (name == "lemma-check") result = cmd_lemma(s);
    else if (name == "orbits") result = cmd_orbits(s, group());
    else if (name == "components") result = cmd_components(s, group());
    else if (name == "char-interval") result = component_intervals(s, group(), false);
    else if (name == "separate") result = cmd_separate(s, group());
    else if (name == "sym-check") result = cmd_sym(s, group());
    else if (name == "r-invariant") result = cmd_r(s);
    else if (name == "parse") result = cmd_parse(s);

    emit(result, config, s.format, out);
    if (result.failed) {
      err << "verification failed: " << result.failure << "\n";
      return kExitVerificationFailed;
    }
    return kExitOk;
  } catch (const BudgetExceeded& e) {
    err << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal check failed: " << e.what() << "\n";
    return kExitVerificationFailed;
  }
}

}  // namespace branchlab
