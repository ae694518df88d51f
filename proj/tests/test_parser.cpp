#include <random>

#include "doctest.h"
#include "symloc/parser.hpp"
#include "test_util.hpp"

using namespace symloc;
using symloc::test::data_path;
using symloc::test::mop_from_file;
using symloc::test::mop_from_text;
using symloc::test::slurp;

TEST_CASE("tsp4 parses into the expected shape") {
  Mop mop = mop_from_file("tsp4.mop");
  CHECK(mop.name == "tsp4");
  CHECK(mop.vocabulary.types.size() == 2);
  REQUIRE(mop.var_symbols().size() == 1);
  const SymbolDecl& map = mop.symbol(mop.var_symbols()[0]);
  CHECK(map.name == "Map");
  CHECK(map.kind == SymbolKind::Function);
  CHECK(mop.symbol(*mop.symbol_id("Distance")).binding == Binding::Interpreted);
  CHECK(mop.symbol(*mop.symbol_id("Next")).binding == Binding::Interpreted);
  CHECK(mop.theory.size() == 1);
  CHECK(mop.sense == Sense::Minimize);
}

TEST_CASE("empty input reports the missing header") {
  ParseResult result = parse_model("", "<test>");
  REQUIRE(!result.ok());
  CHECK(result.diagnostics[0].message == "expected 'mop'");
}

TEST_CASE("a function application is not a formula") {
  std::string text = R"(
    mop bad {
      type City = { c1, c2 };
      var func Map(City) -> City;
      constraint forall x in City: Map(x);
      minimize count { x in City | Map(x) = x };
    }
  )";
  ParseResult result = parse_model(text, "<test>");
  REQUIRE(!result.ok());
  bool found = false;
  for (const auto& d : result.diagnostics)
    if (d.message.find("expected formula, found term") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("a bare variable is not a formula either") {
  std::string text = R"(
    mop bad {
      type City = { c1 };
      var pred P(City);
      constraint forall x in City: x;
      minimize count { x in City | P(x) };
    }
  )";
  ParseResult result = parse_model(text, "<test>");
  REQUIRE(!result.ok());
  bool found = false;
  for (const auto& d : result.diagnostics)
    if (d.message.find("expected formula, found term") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("diagnostics carry a span inside the offending token") {
  std::string text = "mop m {\n  type T = { a };\n  var pred P(T);\n"
                     "  constraint Q(a);\n  minimize count { x in T | P(x) };\n}\n";
  ParseResult result = parse_model(text, "file.mop");
  REQUIRE(!result.ok());
  const ParseDiagnostic& d = result.diagnostics[0];
  CHECK(d.span.file == "file.mop");
  CHECK(d.span.line == 4);
  CHECK(d.span.column == 14);
  CHECK(d.span.length == 1);
  CHECK(d.message.find("Q") != std::string::npos);
}

TEST_CASE("duplicate declarations are rejected") {
  std::string text = R"(
    mop dup {
      type T = { a };
      type T = { b };
      var pred P(T);
      minimize count { x in T | P(x) };
    }
  )";
  ParseResult result = parse_model(text, "<test>");
  REQUIRE(!result.ok());
  CHECK(result.diagnostics[0].message.find("duplicate declaration") != std::string::npos);
}

TEST_CASE("conflicting objectives are rejected") {
  std::string text = R"(
    mop two {
      type T = { a };
      var pred P(T);
      minimize count { x in T | P(x) };
      maximize count { x in T | P(x) };
    }
  )";
  ParseResult result = parse_model(text, "<test>");
  REQUIRE(!result.ok());
  CHECK(result.diagnostics[0].message.find("conflicting objective") != std::string::npos);
}

TEST_CASE("format round-trips every bundled model") {
  for (const char* name :
       {"tsp4.mop", "tsp6.mop", "tsp_alt4.mop", "shortest_path4.mop",
        "shortest_path5.mop", "max_clique6.mop", "max_clique6_sym.mop", "cnp_k3.mop",
        "cnp5x3.mop", "knapsack3.mop", "knapsack6.mop", "assignment2.mop",
        "assignment3.mop"}) {
    CAPTURE(name);
    Mop first = mop_from_file(name);
    std::string printed = format_model(first);
    ParseResult reparsed = parse_model(printed, "<formatted>");
    REQUIRE_MESSAGE(reparsed.ok(), printed);
    CHECK(mop_equal(first, *reparsed.mop));
    // Formatting is deterministic and a fixed point.
    CHECK(format_model(first) == printed);
    CHECK(format_model(*reparsed.mop) == printed);
  }
}

TEST_CASE("format preserves declaration order") {
  Mop mop = mop_from_file("tsp4.mop");
  std::string printed = format_model(mop);
  std::size_t city = printed.find("type City");
  std::size_t index = printed.find("type Index");
  std::size_t distance = printed.find("func Distance");
  std::size_t next = printed.find("func Next");
  std::size_t map = printed.find("var func Map");
  CHECK(city < index);
  CHECK(index < distance);
  CHECK(distance < next);
  CHECK(next < map);
}

TEST_CASE("assignment json reads the documented tour") {
  Mop mop = mop_from_file("tsp4.mop");
  auto result = read_assignment(
      R"({"Map": {"0":"c1","1":"c2","2":"c3","3":"c4"}})", mop);
  REQUIRE_MESSAGE(result.ok(), result.error);
  CHECK(well_typed(mop, *result.assignment));
  const Table& map = result.assignment->tables[0];
  const auto& city = mop.domain(*mop.type_id("City"));
  CHECK(map.entries == std::vector<long long>{city[0], city[1], city[2], city[3]});
}

TEST_CASE("write then read is the identity on random assignments") {
  std::mt19937_64 rng(42);
  for (const char* name : {"tsp4.mop", "knapsack3.mop", "cnp_k3.mop", "tsp_alt4.mop"}) {
    Mop mop = mop_from_file(name);
    for (int i = 0; i < 25; ++i) {
      Assignment a = random_assignment(mop, rng);
      auto back = read_assignment(write_assignment(mop, a), mop);
      REQUIRE_MESSAGE(back.ok(), back.error);
      CHECK(*back.assignment == a);
    }
  }
}

TEST_CASE("assignment json rejects unknown elements and bad shapes") {
  Mop mop = mop_from_file("tsp4.mop");
  auto bad_elem = read_assignment(R"({"Map": {"0":"nope","1":"c2","2":"c3","3":"c4"}})", mop);
  CHECK(!bad_elem.ok());
  CHECK(bad_elem.error.find("unknown element") != std::string::npos);

  auto missing = read_assignment(R"({})", mop);
  CHECK(!missing.ok());
  CHECK(missing.error.find("missing var symbol") != std::string::npos);

  auto partial = read_assignment(R"({"Map": {"0":"c1"}})", mop);
  CHECK(!partial.ok());
  CHECK(partial.error.find("partial function table") != std::string::npos);

  auto extra = read_assignment(R"({"Map": {"0":"c1","1":"c2","2":"c3","3":"c4"}, "X": []})", mop);
  CHECK(!extra.ok());
}

TEST_CASE("late type domains parse like inline ones") {
  std::string late = R"(
    mop late {
      type City;
      var pred P(City);
      minimize count { x in City | P(x) };
      City = { c1, c2, c3 };
    }
  )";
  Mop mop = mop_from_text(late);
  CHECK(mop.domain(*mop.type_id("City")).size() == 3);
  CHECK(validate(mop).ok());
}

TEST_CASE("parenthesized terms and formulas disambiguate") {
  std::string text = R"(
    mop parens {
      type T = { a, b };
      func F(T) -> int;
      var pred P(T);
      constraint forall x in T: (P(x) | P(x)) & (F(x) + 1) > 0;
      minimize count { x in T | P(x) };
      F = { (a) -> 1, (b) -> 2 };
    }
  )";
  CHECK(validate(mop_from_text(text)).ok());
}
