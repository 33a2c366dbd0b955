#include <gtest/gtest.h>

#include "graver_opt/document.hpp"
#include "graver_opt/oracle.hpp"
#include "support.hpp"

using namespace graver_opt;
using namespace test_support;

namespace {

const char* kLpSmall = R"({
  "format_version": 1, "kind": "lp",
  "payload": {"A": [[2,1,0,1,0,0],[1,2,0,0,1,0],[0,0,1,0,0,1]], "b": [2,2,1], "start": [0,1,0,1,0,1]},
  "objective": {"kind": "linear", "c": [1,1,-1,0,0,0]}
})";

const char* kIpSquares = R"({
  "format_version": 1, "kind": "ip",
  "payload": {"A": [[1,1]], "b": [3], "upper": [3,3]},
  "objective": {"kind": "composite", "c": [0,0], "rows": [
    {"coeffs": [1,0], "f": {"kind": "poly", "coeffs": [0,0,1]}},
    {"coeffs": [0,1], "f": {"kind": "poly", "coeffs": [0,0,1]}}]}
})";

const char* kTransportation = R"({
  "format_version": 1, "kind": "transportation",
  "payload": {"supplies": [3,3], "demands": [2,2,2], "caps": 3},
  "objective": {"kind": "separable", "f": [
    [{"kind": "poly", "coeffs": [0,0,1]}, {"kind": "poly", "coeffs": [0,0,1]}],
    [{"kind": "poly", "coeffs": [0,0,1]}, {"kind": "poly", "coeffs": [0,0,1]}],
    [{"kind": "poly", "coeffs": [0,0,1]}, {"kind": "poly", "coeffs": [0,0,1]}]]}
})";

InstanceDocument doc(const char* text) { return parse_document_text(text); }

}  // namespace

TEST(Scalars, IntegersAndRationals) {
  EXPECT_EQ(int_from_json(Json(-7)), -7);
  EXPECT_EQ(int_from_json(Json("123456789012345678901234567890")), Int("123456789012345678901234567890"));
  EXPECT_EQ(int_from_json(Json(18446744073709551615ull)), Int("18446744073709551615"));
  EXPECT_EQ(rat_from_json(Json("-6/4")), Rat(-3, 2));
  EXPECT_EQ(rat_from_json(Json(5)), 5);
  EXPECT_EQ(to_json(Rat(-3, 2)), Json("-3/2"));
  EXPECT_EQ(int_from_json(to_json(Int("-98765432109876543210"))), Int("-98765432109876543210"));
  for (const Json& bad : {Json(1.5), Json("1.0"), Json("abc"), Json(""), Json::array(), Json(true)}) {
    try {
      int_from_json(bad);
      FAIL() << bad.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
    }
  }
  EXPECT_THROW(rat_from_json(Json(0.5)), Error);
  EXPECT_THROW(rat_from_json(Json("1/0")), Error);
}

TEST(Scalars, UnivariateRoundtrip) {
  const std::vector<Univariate> fs{Univariate::zero(), Univariate::square(),
                                   Univariate::abs_power(Int(2), 3, Int(-1)),
                                   Univariate::table({{Int(0), Rat(1)}, {Int(1), Rat(0)}, {Int(2), Rat(1, 2)}})};
  for (const Univariate& f : fs) {
    const Univariate g = univariate_from_json(to_json(f));
    for (long x = -3; x <= 3; ++x) EXPECT_EQ(g(Int(x)), f(Int(x)));
    EXPECT_EQ(to_json(g), to_json(f));
  }
}

TEST(Documents, ParseSerializeRoundtrip) {
  for (const char* text : {kLpSmall, kIpSquares, kTransportation}) {
    const InstanceDocument d = doc(text);
    EXPECT_EQ(to_json(d), to_json(parse_document(to_json(d))));
    EXPECT_EQ(to_json(d)["payload"], Json::parse(text)["payload"]);
  }
}

TEST(Documents, SchemaErrors) {
  const std::vector<std::string> bad{
      "not json",
      "[]",
      R"({"format_version": 2, "kind": "ip", "payload": {}})",
      R"({"format_version": 1, "kind": "banana", "payload": {}})",
      R"({"format_version": 1, "kind": "ip"})",
      R"({"format_version": 1, "kind": "ip", "payload": 3})",
  };
  for (const std::string& text : bad) {
    try {
      parse_document_text(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
    }
  }
  // Structurally valid but with a float entry: rejected when the instance is read.
  const RunOutcome r = run_solve(
      doc(R"({"format_version": 1, "kind": "ip", "payload": {"A": [[1, 1.5]], "b": [3], "upper": [3,3]},
              "objective": {"kind": "linear", "c": [0,0]}})"));
  EXPECT_EQ(r.exit_code, kExitError);
  EXPECT_EQ(r.document["status"], "error");
  EXPECT_EQ(r.document["error"], "Parse");
}

TEST(RunSolve, LpExample) {
  const RunOutcome r = run_solve(doc(kLpSmall), RunFlags{.trace = true});
  ASSERT_EQ(r.exit_code, kExitOptimal) << r.document.dump();
  EXPECT_EQ(r.document["status"], "optimal");
  EXPECT_EQ(rat_from_json(r.document["value"]), -1);
  const RatVec z = rat_vec_from_json(r.document["point"]);
  const FeasibleBox box = box_from_document(doc(kLpSmall));
  EXPECT_TRUE(box.contains(std::span<const Rat>(z)));
  EXPECT_EQ(z[2], 1);
  EXPECT_TRUE(r.document["trace"]["iterations"].is_array());
  EXPECT_EQ(r.document["stats"]["augment_steps"], r.document["trace"]["iterations"].size());
}

TEST(RunSolve, IpModeOnLpDocument) {
  // Integer solves need every upper bound.
  EXPECT_EQ(run_solve(doc(kLpSmall), RunFlags{.mode = "ip"}).exit_code, kExitError);
  Json j = Json::parse(kLpSmall);
  j["payload"]["upper"] = Json::parse("[2,2,1,2,2,1]");
  const RunOutcome r = run_solve(parse_document(j), RunFlags{.mode = "ip"});
  ASSERT_EQ(r.exit_code, kExitOptimal) << r.document.dump();
  EXPECT_EQ(rat_from_json(r.document["value"]), -1);
  for (const Json& x : r.document["point"]) EXPECT_TRUE(x.is_number_integer());
}

TEST(RunSolve, SquaresMatchesOracle) {
  const RunOutcome s = run_solve(doc(kIpSquares));
  const RunOutcome o = run_oracle(doc(kIpSquares));
  ASSERT_EQ(s.exit_code, kExitOptimal);
  ASSERT_EQ(o.exit_code, kExitOptimal);
  EXPECT_EQ(s.document["value"], o.document["value"]);
  EXPECT_EQ(o.document["point"], Json::parse("[1,2]"));
  EXPECT_EQ(o.document["stats"]["feasible_points"], 4);
}

TEST(RunSolve, ExitCodes) {
  const RunOutcome inf = run_solve(
      doc(R"({"format_version": 1, "kind": "ip", "payload": {"A": [[2,2]], "b": [3], "upper": [4,4]},
              "objective": {"kind": "linear", "c": [1,1]}})"));
  EXPECT_EQ(inf.exit_code, kExitInfeasible);
  EXPECT_EQ(inf.document["status"], "infeasible");

  const RunOutcome unb = run_solve(
      doc(R"({"format_version": 1, "kind": "lp", "payload": {"A": [[1,-1]], "b": [0], "start": [0,0]},
              "objective": {"kind": "linear", "c": [-1,0]}})"));
  EXPECT_EQ(unb.exit_code, kExitUnbounded);
  EXPECT_EQ(unb.document["status"], "unbounded");

  const RunOutcome box = run_solve(
      doc(R"({"format_version": 1, "kind": "ip", "payload": {"A": [[1,-1]], "b": [0]},
              "objective": {"kind": "linear", "c": [-1,0]}})"));
  EXPECT_EQ(box.exit_code, kExitError);

  RunFlags tiny;
  tiny.cell_cap = 3;
  const RunOutcome big = run_oracle(
      doc(R"({"format_version": 1, "kind": "ip", "payload": {"n": 3, "A": [], "b": [], "upper": [5,5,5]},
              "objective": {"kind": "linear", "c": [1,1,1]}})"),
      tiny);
  EXPECT_EQ(big.exit_code, kExitSearchSpace);

  EXPECT_EQ(run_solve(doc(kIpSquares), RunFlags{.mode = "simplex"}).exit_code, kExitError);
  EXPECT_EQ(run_solve(doc(kTransportation), RunFlags{.mode = "lp"}).exit_code, kExitError);
}

TEST(RunSolve, TransportationMatchesOracle) {
  const RunOutcome s = run_solve(doc(kTransportation));
  const RunOutcome o = run_oracle(doc(kTransportation));
  ASSERT_EQ(s.exit_code, kExitOptimal) << s.document.dump();
  ASSERT_EQ(o.exit_code, kExitOptimal);
  EXPECT_EQ(rat_from_json(s.document["value"]), 6);
  EXPECT_EQ(rat_from_json(o.document["value"]), 6);
  EXPECT_EQ(s.document["point"], Json::parse("[1,1,1,1,1,1]"));
}

TEST(RunSolve, DeterministicAcrossThreads) {
  for (const char* text : {kLpSmall, kIpSquares, kTransportation}) {
    RunFlags one{.trace = true, .threads = 1};
    RunFlags four{.trace = true, .threads = 4};
    EXPECT_EQ(without_wall_ms(run_solve(doc(text), one).document),
              without_wall_ms(run_solve(doc(text), four).document));
  }
}

TEST(RunBasis, GraverCircuitsComposite) {
  const InstanceDocument d = doc(R"({"format_version": 1, "kind": "ip",
      "payload": {"A": [[1,1]], "b": [0], "upper": [1,1]},
      "objective": {"kind": "composite", "c": [0,0],
                    "rows": [{"coeffs": [1,0], "f": {"kind": "poly", "coeffs": [0,0,1]}}]}})");
  const RunOutcome g = run_basis(d, BasisKind::kGraver);
  EXPECT_EQ(g.document["elements"], Json::parse("[[-1,1],[1,-1]]"));
  EXPECT_EQ(g.document["count"], 2);
  const RunOutcome c = run_basis(d, BasisKind::kCircuits);
  EXPECT_EQ(c.document["elements"], g.document["elements"]);
  const RunOutcome comp = run_basis(d, BasisKind::kComposite);
  EXPECT_EQ(comp.document["coupling"], Json::parse("[[1,0]]"));
  EXPECT_EQ(comp.document["lifted"], Json::parse("[[-1,1,1],[1,-1,-1]]"));

  const RunOutcome nf = run_basis(doc(kTransportation), BasisKind::kGraver);
  ASSERT_EQ(nf.exit_code, kExitOptimal) << nf.document.dump();
  EXPECT_EQ(nf.document["matrix"].size(), 2u + 3u);
  EXPECT_GT(nf.document["count"].get<int>(), 0);
}

TEST(RunModel, TranslationIsIdempotent) {
  const RunOutcome m = run_model(doc(kTransportation));
  ASSERT_EQ(m.exit_code, kExitOptimal);
  EXPECT_EQ(m.document["kind"], "nfold");
  const RunOutcome again = run_model(parse_document(m.document));
  EXPECT_EQ(again.document, m.document);
  EXPECT_EQ(without_wall_ms(run_solve(parse_document(m.document)).document)["value"],
            without_wall_ms(run_solve(doc(kTransportation)).document)["value"]);
}

TEST(RunModel, TwostageDocumentRoundtrip) {
  const InstanceDocument d = doc(R"({"format_version": 1, "kind": "twostage",
      "payload": {"m": 1, "n": 2, "N": 2, "T": [[1]], "W": [[1,1]], "b": [[2],[1]],
                  "ux": [2], "uy": [[2,2],[2,2]]},
      "objective": {"kind": "twostage", "C": [[0]], "D": [[1,0]],
                    "f": [[{"kind": "poly", "coeffs": [0,0,1]}],[{"kind": "poly", "coeffs": [0,0,1]}]]}})");
  const TwoStageInstance inst = twostage_from_document(d);
  EXPECT_EQ(to_json(twostage_document(inst))["payload"], to_json(d)["payload"]);
  const RunOutcome s = run_solve(d);
  const RunOutcome o = run_oracle(d);
  ASSERT_EQ(s.exit_code, kExitOptimal) << s.document.dump();
  EXPECT_EQ(s.document["value"], o.document["value"]);
}

TEST(RunModel, DecodeReportsDistanceAndQ) {
  const IntVec received = encode_message(1, 1, 2, Int(2), vec({1, 0}));
  Json j{{"format_version", 1},
         {"kind", "decode"},
         {"payload", {{"L", 1}, {"M", 1}, {"N", 2}, {"u", 1}, {"U", 2}, {"p", "inf"}}}};
  j["payload"]["received"] = to_json(std::span<const Int>(received));
  const InstanceDocument d = parse_document(j);
  const RunOutcome s = run_solve(d);
  ASSERT_EQ(s.exit_code, kExitOptimal) << s.document.dump();
  EXPECT_EQ(rat_from_json(s.document["info"]["distance"]), 0);
  EXPECT_EQ(s.document["info"]["message"], Json::parse("[1,0]"));
  const RunOutcome m = run_model(d);
  EXPECT_EQ(m.document["meta"]["q"], s.document["info"]["q"]);
  const RunOutcome o = run_oracle(d);
  EXPECT_EQ(rat_from_json(o.document["info"]["min_distance"]), 0);
}

TEST(WithoutWallMs, DropsOnlyTiming) {
  Json r{{"status", "optimal"}, {"stats", {{"wall_ms", 12}, {"basis_size", 3}}}};
  EXPECT_EQ(without_wall_ms(r), (Json{{"status", "optimal"}, {"stats", {{"basis_size", 3}}}}));
  EXPECT_EQ(without_wall_ms(Json::array()), Json::array());
}
