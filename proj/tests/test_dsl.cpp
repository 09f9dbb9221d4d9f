#include <doctest.h>

#include "oracle.hpp"

#include "branchlab/catalog.hpp"
#include "branchlab/dsl.hpp"

using namespace branchlab;

namespace {

const char* kGrigorchuk = R"(# grpdef v1
alphabet = 2
gen a = perm (0 1) [e, e]
gen b = perm () [a, c]
gen c = perm () [a, d]
gen d = perm () [e, b]
)";

ParseError parse_failure(const std::string& text) {
  try {
    parse_group(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for: " << text);
  return ParseError(ParseErrorKind::syntax, 0, 0, "");
}

}  // namespace

TEST_CASE("parsed grigorchuk matches the catalog") {
  auto parsed = parse_group(kGrigorchuk);
  auto catalog = load("grigorchuk").group;
  CHECK(emit_group(*parsed) == emit_group(*catalog));
  CHECK(emit_group(*parsed) == kGrigorchuk);
  oracle::TreeOracle a(parsed), b(catalog);
  for (std::size_t g = 0; g < 4; ++g) CHECK(a.level_images({{g, false}}, 6) == b.level_images({{g, false}}, 6));
}

TEST_CASE("forward references, comments and inverses") {
  auto g = parse_group(R"(
    # odometer written with a forward reference
    alphabet = 2
    gen x = perm (0 1) [e, y^-1*y*x]
    gen y = perm () [y, y]  # trivial
  )");
  CHECK(g->generators().size() == 2);
  CHECK(is_trivial(Automorphism::generator(g, "y")));
  auto x = Automorphism::generator(g, "x");
  CHECK(apply(x, Vertex::parse("11", 2)).to_string() == "00");
}

TEST_CASE("portrait generators") {
  auto g = parse_group(R"(alphabet = 3
gen r = portrait { "": (0 1 2), "21": (0 2) }
)");
  auto r = Automorphism::generator(g, "r");
  CHECK(apply(r, Vertex::parse("210", 3)).to_string() == "012");
  CHECK(apply(r, Vertex::parse("100", 3)).to_string() == "200");
  std::string text = emit_group(*g);
  CHECK(emit_group(*parse_group(text)) == text);
  auto sw = switch_group(2);
  auto back = parse_group(emit_group(*sw));
  CHECK(emit_group(*back) == emit_group(*sw));
}

TEST_CASE("error kinds and positions") {
  auto e = parse_failure("alphabet = 2\ngen a = perm (0 1) [e, q]\n");
  CHECK(e.kind() == ParseErrorKind::unknown_identifier);
  CHECK(e.line() == 2);
  CHECK(e.column() == 24);

  e = parse_failure("alphabet = 2\ngen a = perm (0 1) [e]\n");
  CHECK(e.kind() == ParseErrorKind::section_count);
  CHECK(e.line() == 2);

  e = parse_failure("alphabet = 3\ngen a = perm ((0 1)(1 2)) [e, e, e]\n");
  CHECK(e.kind() == ParseErrorKind::not_a_permutation);

  e = parse_failure("alphabet = 2\ngen a = perm (0 2) [e, e]\n");
  CHECK(e.kind() == ParseErrorKind::letter_out_of_range);

  e = parse_failure("alphabet = 2\ngen a = perm () [e, e]\ngen a = perm () [e, e]\n");
  CHECK(e.kind() == ParseErrorKind::duplicate_generator);
  CHECK(e.line() == 3);

  e = parse_failure("alphabet = 2\ngen a = perm () [e, e\n");
  CHECK(e.kind() == ParseErrorKind::syntax);

  e = parse_failure("gen a = perm () [e, e]\n");
  CHECK(e.kind() == ParseErrorKind::syntax);
  CHECK(e.line() == 1);
  CHECK(e.column() == 1);

  e = parse_failure("alphabet = 2\ngen a = portrait { \"2\": (0 1) }\n");
  CHECK(e.kind() == ParseErrorKind::letter_out_of_range);

  CHECK(std::string(parse_failure("alphabet = 2\ngen a = perm (0 1) [e, q]\n").what()).rfind("2:24:", 0) == 0);
}

TEST_CASE("element words") {
  auto g = load("grigorchuk").group;
  CHECK(parse_word(g, "ada").to_string() == "a*d*a");
  CHECK(equal(parse_word(g, "bcd"), Automorphism::identity(g)));
  CHECK(parse_word(g, "e").is_identity_word());
  auto sw = switch_group(2);
  CHECK(parse_word(sw, "s01*h1").to_string() == "s01*h1");
  CHECK(parse_word(sw, "s01h1").to_string() == "s01*h1");
  auto gs = load("gupta-sidki-3").group;
  CHECK(equal(parse_word(gs, "t^-1"), parse_word(gs, "tt")));
  CHECK_THROWS_AS(parse_word(g, "x"), ResolveError);
}
