#include <doctest.h>

#include "oracle.hpp"

#include "branchlab/catalog.hpp"
#include "branchlab/dsl.hpp"

using namespace branchlab;

namespace {

GroupPtr grigorchuk() { return load("grigorchuk").group; }

Automorphism word(const GroupPtr& g, const char* text) { return parse_word(g, text); }

}  // namespace

TEST_CASE("vertex parsing, indexing and shortlex order") {
  Vertex v = Vertex::parse("0110", 2);
  CHECK(v.level() == 4);
  CHECK(v.to_string() == "0110");
  CHECK(v.index(2) == 6);
  CHECK(Vertex::from_index(6, 4, 2) == v);
  CHECK(Vertex::parse("", 2).is_root());
  CHECK(Vertex::parse("21", 3).index(3) == 7);
  CHECK(Vertex::parse("1", 2) < Vertex::parse("00", 2));
  CHECK(Vertex::parse("01", 2) < Vertex::parse("10", 2));
  CHECK(v.prefix(2).to_string() == "01");
  CHECK(v.has_prefix(Vertex::parse("011", 2)));
  CHECK_FALSE(v.has_prefix(Vertex::parse("1", 2)));
  CHECK_THROWS(Vertex::parse("2", 2));
  CHECK_THROWS(Vertex::parse("0-", 2));
  for (std::uint64_t i = 0; i < 27; ++i) CHECK(Vertex::from_index(i, 3, 3).index(3) == i);
}

TEST_CASE("permutations") {
  auto p = Permutation::from_cycles(4, {{0, 1, 2}});
  CHECK(p(0) == 1);
  CHECK(p(2) == 0);
  CHECK(p(3) == 3);
  CHECK((p * p.inverse()).is_identity());
  CHECK((p * p * p).is_identity());
  CHECK(p.cycle_string() == "(0 1 2)");
  CHECK(Permutation::identity(3).cycle_string() == "()");
  auto q = Permutation::from_cycles(4, {{0, 1}, {2, 3}});
  CHECK((p * q)(0) == p(q(0)));
  CHECK_THROWS_AS(Permutation::from_cycles(3, {{0, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation::from_cycles(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation::from_images({0, 0}), std::invalid_argument);
}

TEST_CASE("grigorchuk relations and wreath recursion") {
  auto g = grigorchuk();
  for (const char* rel : {"a*a", "b*b", "c*c", "d*d", "b*c*d", "d*c*b"}) CHECK(is_trivial(word(g, rel)));
  CHECK(equal(word(g, "b*c"), word(g, "d")));
  CHECK_FALSE(is_trivial(word(g, "a*d")));
  // (ad)^4 = e
  CHECK(is_trivial(word(g, "adadadad")));
  CHECK_FALSE(is_trivial(word(g, "adad")));
  auto d = word(g, "d");
  CHECK(is_trivial(section(d, Vertex::parse("0", 2))));
  CHECK(equal(section(d, Vertex::parse("1", 2)), word(g, "b")));
  CHECK(root_permutation(word(g, "a")) == Permutation::from_images({1, 0}));
  auto node = Automorphism::node(Permutation::identity(2), {Automorphism::identity(g), word(g, "b")});
  CHECK(equal(node, d));
  auto ada = word(g, "a*d*a");
  CHECK(equal(section(ada, Vertex::parse("0", 2)), word(g, "b")));
  CHECK(apply(ada, Vertex::parse("000", 2)).to_string() == "001");
}

TEST_CASE("gupta-sidki orders") {
  auto g = load("gupta-sidki-3").group;
  CHECK(is_trivial(word(g, "t*t*t")));
  CHECK(is_trivial(word(g, "a*a*a")));
  CHECK_FALSE(is_trivial(word(g, "a*t")));
  CHECK(equal(inverse(word(g, "t")), word(g, "t*t")));
}

TEST_CASE("library action agrees with the oracle on generators") {
  for (const char* name : {"grigorchuk", "gupta-sidki-3", "binary-odometer"}) {
    auto g = load(name).group;
    oracle::TreeOracle tree(g);
    unsigned d = g->degree();
    std::size_t level = d == 2 ? 7 : 4;
    for (std::size_t gen = 0; gen < g->generators().size(); ++gen) {
      for (bool inv : {false, true}) {
        auto images = tree.level_images({{gen, inv}}, level);
        auto element = oracle::to_element(g, {{gen, inv}});
        for (std::size_t i = 0; i < images.size(); ++i)
          CHECK(apply(element, Vertex::from_index(i, level, d)).index(d) == images[i]);
      }
    }
  }
}

TEST_CASE("odometer adds one with carry") {
  auto g = load("binary-odometer").group;
  auto a = Automorphism::generator(g, "a");
  // Letters are least significant first for the odometer.
  CHECK(apply(a, Vertex::parse("000", 2)).to_string() == "100");
  CHECK(apply(a, Vertex::parse("110", 2)).to_string() == "001");
  CHECK(apply(a, Vertex::parse("111", 2)).to_string() == "000");
  CHECK_FALSE(is_trivial(word(g, "aaaaaaaa")));
}

TEST_CASE("portraits of finitary elements") {
  auto g = switch_group(3);
  auto s = Automorphism::generator(g, "s01");
  Portrait pic = portrait(s, 4);
  REQUIRE(pic.entries().size() == 1);
  CHECK(pic.entries().begin()->first.to_string() == "01");
  CHECK(apply(s, Vertex::parse("0100", 2)).to_string() == "0110");
  CHECK(apply(s, Vertex::parse("0000", 2)).to_string() == "0000");
  auto h = Automorphism::generator(g, "h1");
  CHECK(portrait(h, 3).entries().size() == 2);
  CHECK(equal(Automorphism::from_portrait(g, portrait(h, 3)), h));
  CHECK(portrait(h, 1).is_trivial());
}

TEST_CASE("minimal automata are canonical") {
  auto g = grigorchuk();
  auto m1 = minimize(word(g, "b*c"));
  auto m2 = minimize(word(g, "d"));
  CHECK(m1.serialize() == m2.serialize());
  // d -> {e, b}, b -> {a, c}, c -> {a, d}, a -> {e, e}
  CHECK(minimize(word(g, "d")).size() == 5);
  CHECK(minimize(word(g, "a")).size() == 2);
  CHECK(minimize(Automorphism::identity(g)).size() == 1);
  CHECK(minimize(word(g, "b")).identity_state().has_value());
}

TEST_CASE("budget and resolution errors") {
  auto g = grigorchuk();
  CHECK_THROWS_AS(Automorphism::generator(g, "q"), ResolveError);
  CHECK_THROWS_AS(parse_word(g, "a*q"), ResolveError);
  auto odo = load("binary-odometer").group;
  // a^32 has sections a^16, a^8, ... before any root permutation moves.
  CHECK_THROWS_AS(is_trivial(word(odo, std::string(32, 'a').c_str()), 2), BudgetExceeded);
  auto other = load("gupta-sidki-3").group;
  CHECK_THROWS(compose(word(g, "a"), word(other, "a")));
}
