#include "branchlab/dsl.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace branchlab {

namespace {

enum class Tok { ident, integer, string, inverse, punct, end };

struct Token {
  Tok type = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.type = Tok::ident;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          t.text.push_back(advance());
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.type = Tok::integer;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) t.text.push_back(advance());
      } else if (c == '"') {
        t.type = Tok::string;
        advance();
        while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') t.text.push_back(advance());
        if (pos_ >= text_.size() || text_[pos_] != '"') {
          throw ParseError(ParseErrorKind::syntax, t.line, t.column, "unterminated string");
        }
        advance();
      } else if (c == '^') {
        advance();
        if (text_.substr(pos_, 2) != "-1") throw ParseError(ParseErrorKind::syntax, t.line, t.column, "expected '^-1'");
        advance();
        advance();
        t.type = Tok::inverse;
        t.text = "^-1";
      } else if (std::string_view("=()[]{},:*").find(c) != std::string_view::npos) {
        t.type = Tok::punct;
        t.text.push_back(advance());
      } else {
        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c)
                                                                         : "\\x" + std::to_string(int(static_cast<unsigned char>(c)));
        throw ParseError(ParseErrorKind::syntax, t.line, t.column, "unexpected character '" + shown + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

struct PendingRef {
  std::string name;
  std::size_t line;
  std::size_t column;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  GroupPtr run() {
    expect_keyword("alphabet");
    expect_punct("=");
    const Token& size_tok = expect(Tok::integer, "alphabet size");
    degree_ = parse_int(size_tok);
    if (degree_ < 2 || degree_ > kMaxDegree) {
      fail(ParseErrorKind::syntax, size_tok, "alphabet size must be in [2, " + std::to_string(kMaxDegree) + "]");
    }
    while (peek().type != Tok::end) parse_generator();

    for (const auto& ref : refs_) {
      if (!names_.contains(ref.name)) {
        throw ParseError(ParseErrorKind::unknown_identifier, ref.line, ref.column,
                         "unknown identifier '" + ref.name + "'");
      }
    }
    try {
      return GroupDef::create(degree_, std::move(generators_));
    } catch (const std::invalid_argument& e) {
      throw ParseError(ParseErrorKind::syntax, 1, 1, e.what());
    }
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, const Token& t, const std::string& message) const {
    throw ParseError(kind, t.line, t.column, message);
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::end: return "end of input";
      case Tok::string: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  const Token& expect(Tok type, const std::string& what) {
    const Token& t = peek();
    if (t.type != type) fail(ParseErrorKind::syntax, t, "expected " + what + ", found " + describe(t));
    return next();
  }

  void expect_punct(const char* p) {
    const Token& t = peek();
    if (t.type != Tok::punct || t.text != p) {
      fail(ParseErrorKind::syntax, t, std::string("expected '") + p + "', found " + describe(t));
    }
    next();
  }

  bool accept_punct(const char* p) {
    if (peek().type == Tok::punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }

  void expect_keyword(const char* k) {
    const Token& t = peek();
    if (t.type != Tok::ident || t.text != k) {
      fail(ParseErrorKind::syntax, t, std::string("expected '") + k + "', found " + describe(t));
    }
    next();
  }

  unsigned parse_int(const Token& t) const {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail(ParseErrorKind::syntax, t, "integer too large");
    return value;
  }

  Letter parse_letter(const Token& t) const {
    unsigned value = parse_int(t);
    if (value >= degree_) {
      fail(ParseErrorKind::letter_out_of_range, t,
           "letter " + t.text + " out of range for alphabet size " + std::to_string(degree_));
    }
    return static_cast<Letter>(value);
  }

  void parse_generator() {
    expect_keyword("gen");
    const Token& name_tok = expect(Tok::ident, "generator name");
    if (name_tok.text == "e") fail(ParseErrorKind::syntax, name_tok, "'e' is reserved for the identity");
    if (!names_.insert(name_tok.text).second) {
      fail(ParseErrorKind::duplicate_generator, name_tok, "duplicate generator '" + name_tok.text + "'");
    }
    std::string name = name_tok.text;
    expect_punct("=");
    const Token& kind = expect(Tok::ident, "'perm' or 'portrait'");
    if (kind.text == "perm") {
      Permutation perm = parse_perm();
      const Token& open = peek();
      expect_punct("[");
      std::vector<NamedWord> sections{parse_word()};
      while (accept_punct(",")) sections.push_back(parse_word());
      expect_punct("]");
      if (sections.size() != degree_) {
        fail(ParseErrorKind::section_count, open,
             "section count " + std::to_string(sections.size()) + " differs from alphabet size " +
                 std::to_string(degree_));
      }
      generators_.push_back({std::move(name), RecursionBody{std::move(perm), std::move(sections)}});
    } else if (kind.text == "portrait") {
      expect_punct("{");
      PortraitBody body;
      if (!accept_punct("}")) {
        do {
          const Token& vtok = expect(Tok::string, "vertex string");
          Vertex v;
          for (std::size_t i = 0; i < vtok.text.size(); ++i) {
            char c = vtok.text[i];
            int value = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                        : (c >= 'a' && c <= 'z')                    ? c - 'a' + 10
                                                                    : -1;
            if (value < 0 || static_cast<unsigned>(value) >= degree_) {
              throw ParseError(ParseErrorKind::letter_out_of_range, vtok.line, vtok.column + 1 + i,
                               "letter '" + std::string(1, c) + "' out of range for alphabet size " +
                                   std::to_string(degree_));
            }
            v = v.child(static_cast<Letter>(value));
          }
          expect_punct(":");
          Permutation p = parse_perm();
          if (!body.entries.emplace(v, std::move(p)).second) {
            fail(ParseErrorKind::syntax, vtok, "vertex \"" + vtok.text + "\" listed twice");
          }
        } while (accept_punct(","));
        expect_punct("}");
      }
      generators_.push_back({std::move(name), std::move(body)});
    } else {
      fail(ParseErrorKind::syntax, kind, "expected 'perm' or 'portrait', found " + describe(kind));
    }
  }

  // perm := "(" cycle* ")" ; cycle := "(" INT+ ")" | INT INT+
  Permutation parse_perm() {
    const Token& open = peek();
    expect_punct("(");
    std::vector<std::vector<Letter>> cycles;
    std::vector<const Token*> where;
    while (true) {
      if (accept_punct(")")) break;
      if (peek().type == Tok::punct && peek().text == "(") {
        where.push_back(&next());
        std::vector<Letter> cycle;
        do {
          cycle.push_back(parse_letter(expect(Tok::integer, "letter")));
        } while (peek().type == Tok::integer);
        expect_punct(")");
        cycles.push_back(std::move(cycle));
      } else if (peek().type == Tok::integer) {
        where.push_back(&peek());
        std::vector<Letter> cycle;
        while (peek().type == Tok::integer) cycle.push_back(parse_letter(next()));
        if (cycle.size() < 2) fail(ParseErrorKind::syntax, *where.back(), "a bare cycle needs at least two letters");
        cycles.push_back(std::move(cycle));
      } else {
        fail(ParseErrorKind::syntax, peek(), "expected a cycle or ')', found " + describe(peek()));
      }
    }
    std::vector<bool> used(degree_, false);
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      for (Letter x : cycles[i]) {
        if (used[x]) {
          fail(ParseErrorKind::not_a_permutation, *where[i],
               "letter " + std::to_string(x) + " appears twice: not a permutation");
        }
        used[x] = true;
      }
    }
    try {
      return Permutation::from_cycles(degree_, cycles);
    } catch (const std::invalid_argument& e) {
      fail(ParseErrorKind::not_a_permutation, open, e.what());
    }
  }

  // word := "e" | IDENT ("^-1")? ("*" IDENT ("^-1")?)*
  NamedWord parse_word() {
    NamedWord w;
    do {
      const Token& t = expect(Tok::ident, "generator name or 'e'");
      bool inv = false;
      if (peek().type == Tok::inverse) {
        next();
        inv = true;
      }
      if (t.text == "e") continue;
      refs_.push_back({t.text, t.line, t.column});
      w.push_back({t.text, inv});
    } while (accept_punct("*"));
    return w;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  unsigned degree_ = 0;
  std::set<std::string> names_;
  std::vector<PendingRef> refs_;
  std::vector<GeneratorDef> generators_;
};

std::string perm_text(const Permutation& p) {
  auto cycles = p.cycles();
  if (cycles.empty()) return "()";
  if (cycles.size() == 1) return p.cycle_string();
  return "(" + p.cycle_string() + ")";
}

std::string named_word_text(const NamedWord& w) {
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += "*";
    out += w[i].name;
    if (w[i].inverse) out += "^-1";
  }
  return out;
}

}  // namespace

GroupPtr parse_group(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string emit_group(const GroupDef& group) {
  std::ostringstream out;
  out << "# grpdef v1\n";
  out << "alphabet = " << group.degree() << "\n";
  for (const auto& gen : group.generators()) {
    out << "gen " << gen.name << " = ";
    if (const auto* rec = std::get_if<RecursionBody>(&gen.body)) {
      out << "perm " << perm_text(rec->perm) << " [";
      for (std::size_t i = 0; i < rec->sections.size(); ++i) out << (i ? ", " : "") << named_word_text(rec->sections[i]);
      out << "]\n";
    } else {
      const auto& entries = std::get<PortraitBody>(gen.body).entries;
      out << "portrait {";
      bool first = true;
      for (const auto& [v, p] : entries) {
        if (p.is_identity()) continue;
        out << (first ? " " : ", ") << '"' << v.to_string() << "\": " << perm_text(p);
        first = false;
      }
      out << (first ? "}" : " }") << "\n";
    }
  }
  return out.str();
}

Automorphism parse_word(const GroupPtr& group, std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ResolveError("empty element word");
  if (text == "e") return Automorphism::identity(group);

  Word w;
  auto push = [&](std::string_view name, bool inv) {
    auto index = group->generator_index(name);
    if (!index) throw ResolveError("unknown generator '" + std::string(name) + "'");
    w.emplace_back(static_cast<std::uint32_t>(*index), inv);
  };

  if (text.find('*') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t stop = text.find('*', start);
      if (stop == std::string_view::npos) stop = text.size();
      std::string_view token = text.substr(start, stop - start);
      bool inv = token.ends_with("^-1");
      if (inv) token.remove_suffix(3);
      if (token != "e") push(token, inv);
      start = stop + 1;
    }
    return Automorphism(group, std::move(w));
  }

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best = 0;
    for (const auto& gen : group->generators()) {
      if (gen.name.size() > best && text.substr(pos, gen.name.size()) == gen.name) best = gen.name.size();
    }
    if (best == 0) {
      std::size_t stop = pos;
      while (stop < text.size() && std::isalnum(static_cast<unsigned char>(text[stop]))) ++stop;
      throw ResolveError("unknown generator '" + std::string(text.substr(pos, std::max<std::size_t>(stop - pos, 1))) +
                         "'");
    }
    std::string_view name = text.substr(pos, best);
    pos += best;
    bool inv = text.substr(pos, 3) == "^-1";
    if (inv) pos += 3;
    push(name, inv);
  }
  return Automorphism(group, std::move(w));
}

}  // namespace branchlab
