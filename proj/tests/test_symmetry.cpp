#include <set>
#include <tuple>
#include <random>

#include "doctest.h"
#include "symloc/parser.hpp"
#include "symloc/symmetry.hpp"
#include "test_util.hpp"

using namespace symloc;
using symloc::test::mop_from_file;
using symloc::test::mop_from_text;

namespace {

Assignment from_json(const Mop& mop, const std::string& json) {
  auto result = read_assignment(json, mop);
  REQUIRE_MESSAGE(result.ok(), result.error);
  return *result.assignment;
}

ElemId elem(const Mop& mop, const std::string& text) {
  if (auto id = mop.structure.elements.find_label(text)) return *id;
  auto id = mop.structure.elements.find_int(std::stoll(text));
  REQUIRE(id.has_value());
  return *id;
}

DesSymmetry accepted_pair(const Mop& mop, const std::string& type, const std::string& a,
                          const std::string& b) {
  auto checked = check_des_pair(mop, *mop.type_id(type), elem(mop, a), elem(mop, b));
  REQUIRE(std::holds_alternative<DesSymmetry>(checked));
  return std::get<DesSymmetry>(checked);
}

const char* kTinyClique = R"(
  mop clique3 {
    type Node = { n1, n2, n3 };
    pred Edge(Node, Node);
    var pred InClique(Node);
    constraint forall x in Node: forall y in Node:
      (InClique(x) & InClique(y) & x != y) => Edge(x, y);
    maximize count { x in Node | InClique(x) };
    Edge = { (n1,n2), (n2,n1) };
  }
)";

}  // namespace

TEST_CASE("candidate pairs come from objective-relevant var symbols") {
  Mop tsp = mop_from_file("tsp4.mop");
  auto pairs = candidate_pairs(tsp);
  CHECK(pairs.size() == 12);  // C(4,2) city pairs + C(4,2) index pairs
  int city = 0, index = 0;
  for (const auto& p : pairs) {
    if (tsp.type(p.type).name == "City") ++city;
    if (tsp.type(p.type).name == "Index") ++index;
  }
  CHECK(city == 6);
  CHECK(index == 6);

  Mop cnp = mop_from_file("cnp_k3.mop");
  CHECK(candidate_pairs(cnp).size() == 6);  // both Node and Color feed Coloring
}

TEST_CASE("an objective without var symbols yields no candidates") {
  std::string text = R"(
    mop flat {
      type Object = { o1, o2 };
      func Volume(Object) -> int;
      var pred In(Object);
      constraint sum { Volume(o) | o in Object, In(o) } <= 3;
      minimize sum { Volume(o) | o in Object };
      Volume = { (o1) -> 1, (o2) -> 2 };
    }
  )";
  CHECK(candidate_pairs(mop_from_text(text)).empty());
}

TEST_CASE("tsp city pairs are accepted with sigma Map") {
  Mop mop = mop_from_file("tsp4.mop");
  DesSymmetry s = accepted_pair(mop, "City", "c1", "c2");
  REQUIRE(s.sigma.size() == 1);
  CHECK(mop.symbol(s.sigma[0]).name == "Map");
}

TEST_CASE("a non-twin node pair is rejected on the tiny clique graph") {
  Mop mop = mop_from_text(kTinyClique);
  TypeId node = *mop.type_id("Node");
  ElemId n1 = *mop.structure.elements.find_label("n1");
  ElemId n3 = *mop.structure.elements.find_label("n3");
  auto checked = check_des_pair(mop, node, n1, n3);
  REQUIRE(std::holds_alternative<RejectReason>(checked));
  const RejectReason& reason = std::get<RejectReason>(checked);
  CHECK(reason.kind == RejectReason::Kind::InterpretedNotInvariant);
  CHECK(reason.detail == "Edge");
}

TEST_CASE("pairs touching Start or End are rejected on shortest path") {
  Mop mop = mop_from_file("shortest_path4.mop");
  TypeId city = *mop.type_id("City");
  ElemId c1 = *mop.structure.elements.find_label("c1");
  ElemId c2 = *mop.structure.elements.find_label("c2");
  auto checked = check_des_pair(mop, city, c1, c2);
  REQUIRE(std::holds_alternative<RejectReason>(checked));
  const RejectReason& reason = std::get<RejectReason>(checked);
  CHECK(reason.kind == RejectReason::Kind::InterpretedNotInvariant);
  CHECK((reason.detail == "Start" || reason.detail == "End"));
}

TEST_CASE("types under theory arithmetic are rejected as swap candidates") {
  std::string text = R"(
    mop ordered {
      type Index = 0 .. 3;
      type City = { c1, c2, c3, c4 };
      var func Map(Index) -> City;
      constraint forall x in Index: forall y in Index: x < y => Map(x) != Map(y);
      minimize count { c in City | exists x in Index: Map(x) = c };
    }
  )";
  Mop mop = mop_from_text(text);
  TypeId index = *mop.type_id("Index");
  const auto& dom = mop.domain(index);
  auto checked = check_des_pair(mop, index, dom[0], dom[1]);
  REQUIRE(std::holds_alternative<RejectReason>(checked));
  CHECK(std::get<RejectReason>(checked).kind == RejectReason::Kind::TypeUnderArithmetic);
}

TEST_CASE("elements named in the theory are rejected as swap candidates") {
  std::string text = R"(
    mop pinned {
      type City = { c1, c2, c3 };
      var pred P(City);
      constraint P(c1);
      minimize count { x in City | P(x) };
    }
  )";
  Mop mop = mop_from_text(text);
  TypeId city = *mop.type_id("City");
  ElemId c1 = *mop.structure.elements.find_label("c1");
  ElemId c2 = *mop.structure.elements.find_label("c2");
  ElemId c3 = *mop.structure.elements.find_label("c3");
  auto bad = check_des_pair(mop, city, c1, c2);
  REQUIRE(std::holds_alternative<RejectReason>(bad));
  CHECK(std::get<RejectReason>(bad).kind == RejectReason::Kind::LiteralInTheory);
  CHECK(std::holds_alternative<DesSymmetry>(check_des_pair(mop, city, c2, c3)));
}

TEST_CASE("apply_symmetry swaps the mapped cities") {
  Mop mop = mop_from_file("tsp4.mop");
  DesSymmetry s = accepted_pair(mop, "City", "c1", "c2");
  Assignment a = from_json(mop, R"({"Map": {"0":"c1","1":"c2","2":"c3","3":"c4"}})");
  Assignment image = apply_symmetry(mop, s, a);
  Assignment expected = from_json(mop, R"({"Map": {"0":"c2","1":"c1","2":"c3","3":"c4"}})");
  CHECK(image == expected);
}

TEST_CASE("apply_symmetry is an involution on random assignments") {
  Mop mop = mop_from_file("tsp4.mop");
  DesSymmetry city = accepted_pair(mop, "City", "c2", "c4");
  DesSymmetry index = accepted_pair(mop, "Index", "0", "3");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Assignment a = random_assignment(mop, rng);
    CHECK(apply_symmetry(mop, city, apply_symmetry(mop, city, a)) == a);
    CHECK(apply_symmetry(mop, index, apply_symmetry(mop, index, a)) == a);
  }
}

TEST_CASE("an empty sigma is the identity") {
  Mop mop = mop_from_file("tsp4.mop");
  DesSymmetry s = accepted_pair(mop, "City", "c1", "c2");
  s.sigma.clear();
  std::mt19937_64 rng(3);
  Assignment a = random_assignment(mop, rng);
  CHECK(apply_symmetry(mop, s, a) == a);
}

TEST_CASE("interval swaps move table positions, not integers") {
  Mop mop = mop_from_file("tsp4.mop");
  DesSymmetry s = accepted_pair(mop, "Index", "0", "1");
  Assignment a = from_json(mop, R"({"Map": {"0":"c1","1":"c2","2":"c3","3":"c4"}})");
  Assignment image = apply_symmetry(mop, s, a);
  Assignment expected = from_json(mop, R"({"Map": {"0":"c2","1":"c1","2":"c3","3":"c4"}})");
  CHECK(image == expected);
}

TEST_CASE("classification: tsp swaps are variant with a valid witness") {
  Mop mop = mop_from_file("tsp4.mop");
  ClassifyPolicy policy;  // exhaustive
  for (auto [type, a, b] : {std::tuple{"City", "c1", "c2"}, std::tuple{"Index", "0", "2"}}) {
    DesSymmetry s = accepted_pair(mop, type, a, b);
    Classification c = classify_variance(mop, s, policy);
    REQUIRE(c.kind == Classification::Kind::Variant);
    REQUIRE(c.witness.has_value());
    CHECK(objective_value(mop, *c.witness) !=
          objective_value(mop, apply_symmetry(mop, s, *c.witness)));
  }
}

TEST_CASE("classification: cnp color swaps are proved invariant") {
  Mop mop = mop_from_file("cnp_k3.mop");
  DesSymmetry s = accepted_pair(mop, "Color", "col1", "col2");
  Classification c = classify_variance(mop, s, ClassifyPolicy{});
  CHECK(c.kind == Classification::Kind::InvariantProved);
}

TEST_CASE("classification: knapsack equal-volume pairs split by value") {
  Mop mop = mop_from_file("knapsack3.mop");
  DesSymmetry s = accepted_pair(mop, "Object", "o1", "o2");  // values 5 and 7
  Classification c = classify_variance(mop, s, ClassifyPolicy{});
  CHECK(c.kind == Classification::Kind::Variant);

  Mop twin = mop_from_file("knapsack6.mop");  // o3,o4 share volume and value
  DesSymmetry t = accepted_pair(twin, "Object", "o3", "o4");
  CHECK(classify_variance(twin, t, ClassifyPolicy{}).kind ==
        Classification::Kind::InvariantProved);
}

TEST_CASE("syntactic policy cannot clear objective-relevant swaps") {
  Mop mop = mop_from_file("tsp4.mop");
  DesSymmetry s = accepted_pair(mop, "City", "c1", "c2");
  ClassifyPolicy policy;
  policy.kind = ClassifyPolicy::Kind::Syntactic;
  CHECK(classify_variance(mop, s, policy).kind == Classification::Kind::Unclassified);
}

TEST_CASE("sampled classification reports a weaker invariance verdict") {
  Mop mop = mop_from_file("cnp_k3.mop");
  DesSymmetry s = accepted_pair(mop, "Color", "col1", "col3");
  ClassifyPolicy policy;
  policy.kind = ClassifyPolicy::Kind::Sample;
  policy.samples = 64;
  Classification c = classify_variance(mop, s, policy);
  CHECK(c.kind == Classification::Kind::InvariantSampled);
  CHECK(c.samples == 64);
}

TEST_CASE("exhaustive classification refuses oversized spaces") {
  Mop mop = mop_from_file("shortest_path5.mop");  // 2^25 assignments
  TypeId city = *mop.type_id("City");
  ElemId c2 = *mop.structure.elements.find_label("c2");
  ElemId c3 = *mop.structure.elements.find_label("c3");
  auto checked = check_des_pair(mop, city, c2, c3);
  REQUIRE(std::holds_alternative<DesSymmetry>(checked));
  CHECK_THROWS_AS(
      classify_variance(mop, std::get<DesSymmetry>(checked), ClassifyPolicy{}),
      std::invalid_argument);
}

TEST_CASE("detect on tsp4: twelve variant symmetries, nothing rejected") {
  Mop mop = mop_from_file("tsp4.mop");
  DetectionReport report = detect(mop, DetectOptions{});
  CHECK(report.candidates_checked == 12);
  CHECK(report.symmetries.size() == 12);
  CHECK(report.rejected.empty());
  for (const auto& s : report.symmetries)
    CHECK(s.classification.kind == Classification::Kind::Variant);
}

TEST_CASE("detect on cnp_k3: color swaps filtered as objective-invariant") {
  Mop mop = mop_from_file("cnp_k3.mop");
  DetectionReport report = detect(mop, DetectOptions{});
  CHECK(report.candidates_checked == 6);
  CHECK(report.symmetries.empty());
  int invariant = 0, structural = 0;
  for (const auto& r : report.rejected) {
    if (r.reason.kind == RejectReason::Kind::ObjectiveInvariant) ++invariant;
    else ++structural;
  }
  CHECK(invariant == 3);   // the three color swaps
  CHECK(structural == 3);  // the three node swaps
}

TEST_CASE("detect on assignment2: both swap families survive") {
  Mop mop = mop_from_file("assignment2.mop");
  DetectionReport report = detect(mop, DetectOptions{});
  CHECK(report.symmetries.size() == 2);
  for (const auto& s : report.symmetries)
    CHECK(s.classification.kind == Classification::Kind::Variant);
}

TEST_CASE("detection complexity: candidates equal the pair-count formula") {
  for (const char* name : {"tsp4.mop", "tsp6.mop", "cnp_k3.mop", "knapsack6.mop"}) {
    Mop mop = mop_from_file(name);
    std::uint64_t expected = 0;
    std::set<TypeId> seen;
    for (const auto& p : candidate_pairs(mop)) {
      if (seen.insert(p.type).second) {
        std::uint64_t d = mop.domain(p.type).size();
        expected += d * (d - 1) / 2;
      }
    }
    DetectionReport report = detect(mop, DetectOptions{});
    CHECK(report.candidates_checked == expected);
  }
}

TEST_CASE("every detected symmetry passes exhaustive semantic verification") {
  for (const char* name : {"tsp4.mop", "tsp_alt4.mop", "knapsack3.mop", "knapsack6.mop",
                           "assignment2.mop", "assignment3.mop"}) {
    CAPTURE(name);
    Mop mop = mop_from_file(name);
    DetectionReport report = detect(mop, DetectOptions{});
    for (const auto& s : report.symmetries) {
      VerificationReport vr = verify_symmetry(mop, s, VerifyBudget{});
      CHECK(vr.exhaustive);
      CHECK(vr.pass);
    }
  }
}

TEST_CASE("a bogus swap fails semantic verification with a counterexample") {
  Mop mop = mop_from_text(kTinyClique);
  DesSymmetry bogus;
  bogus.type = *mop.type_id("Node");
  bogus.a = *mop.structure.elements.find_label("n1");
  bogus.b = *mop.structure.elements.find_label("n3");
  bogus.sigma = {*mop.symbol_id("InClique")};
  VerificationReport vr = verify_symmetry(mop, bogus, VerifyBudget{});
  CHECK(!vr.pass);
  REQUIRE(vr.counterexample.has_value());
  CHECK(check_model(mop, *vr.counterexample) !=
        check_model(mop, apply_symmetry(mop, bogus, *vr.counterexample)));
}

TEST_CASE("a symmetry with empty sigma verifies trivially") {
  Mop mop = mop_from_file("cnp_k3.mop");
  DesSymmetry s = accepted_pair(mop, "Color", "col1", "col2");
  s.sigma.clear();
  VerificationReport vr = verify_symmetry(mop, s, VerifyBudget{});
  CHECK(vr.pass);
}

TEST_CASE("detect is deterministic per policy and seed") {
  Mop mop = mop_from_file("knapsack6.mop");
  DetectOptions options;
  options.policy.kind = ClassifyPolicy::Kind::Sample;
  options.policy.seed = 17;
  DetectionReport a = detect(mop, options);
  DetectionReport b = detect(mop, options);
  REQUIRE(a.symmetries.size() == b.symmetries.size());
  for (std::size_t i = 0; i < a.symmetries.size(); ++i) {
    CHECK(a.symmetries[i].a == b.symmetries[i].a);
    CHECK(a.symmetries[i].classification.kind == b.symmetries[i].classification.kind);
    if (a.symmetries[i].classification.witness)
      CHECK(*a.symmetries[i].classification.witness ==
            *b.symmetries[i].classification.witness);
  }
}
