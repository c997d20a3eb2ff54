#include "gaudin/cli.hpp"

#include <cstdlib>
#include <string>

#include "doctest.h"
#include "nlohmann/json.hpp"

using namespace gaudin;
using njson = nlohmann::json;

namespace {

njson parse_report(const CliOutcome& out) { return njson::parse(out.report); }

const char* kTwoSiteSinglet = R"({
  "schema": 1,
  "algebra": {"type": "A", "rank": 1},
  "points": ["0", "1"],
  "weights": [[1], [1]],
  "mu": [0]
})";

const char* kThreeSites = R"({
  "schema": 1,
  "algebra": {"type": "A", "rank": 1},
  "points": ["0", "1", "2"],
  "weights": [[1], [1], [1]],
  "mu": [1],
  "solver": {"seed": 7, "starts": 40}
})";

}  // namespace

TEST_CASE("schema violations exit 2 and name the offending key") {
  struct Case {
    const char* text;
    const char* needle;
  };
  const Case cases[] = {
      {"{", "not valid JSON"},
      {R"([1, 2])", "expected a JSON object"},
      {R"({"schema": 1})", "missing required key"},
      {R"({"schema": 2, "algebra": {"type": "A", "rank": 1}, "points": ["0"], "weights": [[1]]})",
       "schema: expected the integer 1"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["0"], "weights": [[1]],
           "extra": true})",
       "extra: unknown key"},
      {R"({"schema": 1, "algebra": {"type": "B", "rank": 2}, "points": ["0"], "weights": [[1, 0]]})",
       "algebra.type"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 0}, "points": ["0"], "weights": [[1]]})",
       "algebra.rank"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["0", "1"],
           "weights": [[1], [1, 2]]})",
       "weights[1]"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["0", "1"],
           "weights": [[1], [-1]]})",
       "weights[1][0]"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["x"], "weights": [[1]]})",
       "points[0]"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["1/0"], "weights": [[1]]})",
       "points[0]"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["0"], "weights": [[1]],
           "colors": [2]})",
       "colors[0]"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["0"], "weights": [[1]],
           "bethe": {"w": [], "colors": [], "foo": 1}})",
       "bethe.foo"},
      {R"({"schema": 1, "algebra": {"type": "A", "rank": 1}, "points": ["0"], "weights": [[1]],
           "solver": {"tol": -1}})",
       "solver.tol"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    const auto out = run_problem("solve", c.text);
    CHECK(out.exit_code == 2);
    const auto rep = parse_report(out);
    CHECK(rep["error"]["exit_code"] == 2);
    const std::string msg = rep["error"]["message"].get<std::string>();
    CHECK(msg.find(c.needle) != std::string::npos);
  }
}

TEST_CASE("degenerate inputs exit 2") {
  const char* coincident = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "0"],
    "weights": [[1], [1]]
  })";
  CHECK(run_problem("solve", coincident).exit_code == 2);
  CHECK(run_problem("frobnicate", kTwoSiteSinglet).exit_code == 2);
}

TEST_CASE("caps exit 3") {
  njson big;
  big["schema"] = 1;
  big["algebra"] = njson{{"type", "A"}, {"rank", 1}};
  for (int i = 0; i < 17; ++i) {
    big["points"].push_back(std::to_string(i));
    big["weights"].push_back(njson::array({1}));
  }
  CHECK(run_problem("solve", big.dump()).exit_code == 3);

  njson wide = njson::parse(kTwoSiteSinglet);
  wide.erase("mu");
  wide["colors"] = njson::array();
  for (int i = 0; i < 65; ++i) wide["colors"].push_back(1);
  CHECK(run_problem("solve", wide.dump()).exit_code == 3);

  // verify needs the dense oracle; a huge tensor space is refused up front
  const char* heavy = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "1", "2"],
    "weights": [[20], [20], [20]],
    "mu": [60]
  })";
  CHECK(run_problem("verify", heavy).exit_code == 3);
}

TEST_CASE("solve finds the two-site singlet root at the midpoint") {
  const auto out = run_problem("solve", kTwoSiteSinglet);
  REQUIRE(out.exit_code == 0);
  const auto rep = parse_report(out);
  CHECK(rep["command"] == "solve");
  CHECK(rep["input"]["points"][0] == "0");
  CHECK(rep["kappa_pair"].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
  REQUIRE(rep["families"].size() == 1);
  const auto& fam = rep["families"][0];
  CHECK(fam["singular_dimension"] == 1);
  CHECK(fam["mu"] == njson::array({0}));
  REQUIRE(fam["solutions"].size() == 1);
  const auto& sol = fam["solutions"][0];
  CHECK(sol["w"][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol["w"][0][1].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol["residual"].get<double>() <= 1e-12);
  CHECK(sol["predicted"][0][0].get<double>() == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(sol["predicted"][1][0].get<double>() == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(sol["regular"] == njson::array({true}));
}

TEST_CASE("verify passes clean input and rejects a perturbed root") {
  const auto ok = run_problem("verify", kTwoSiteSinglet);
  REQUIRE(ok.exit_code == 0);
  const auto rep = parse_report(ok);
  const auto& fam = rep["families"][0];
  CHECK(fam["pass"] == true);
  CHECK(fam["completeness"]["found"] == 1);
  CHECK(fam["completeness"]["expected"] == 1);
  REQUIRE(fam["oracle"].size() == 1);
  CHECK(fam["oracle"][0]["values"][0][0].get<double>() == doctest::Approx(1.5).epsilon(1e-10));
  for (const auto& [name, chk] : fam["solutions"][0]["checks"].items()) {
    CAPTURE(name);
    CHECK(chk["pass"] == true);
  }

  CliOverrides ov;
  ov.perturb = 1e-3;
  const auto bad = run_problem("verify", kTwoSiteSinglet, ov);
  CHECK(bad.exit_code == 1);
  const auto brep = parse_report(bad);
  const auto& sols = brep["families"][0]["solutions"];
  REQUIRE(sols.size() == 2);
  CHECK(sols[1]["injected"] == true);
  CHECK(sols[1]["pass"] == false);
  CHECK(sols[1]["checks"]["bae_residual"]["pass"] == false);
  CHECK(sols[1]["checks"]["regularity_worst"]["pass"] == false);
}

TEST_CASE("an overweight color request yields an empty solution list") {
  const char* text = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0"],
    "weights": [[2]],
    "colors": [1]
  })";
  const auto out = run_problem("verify", text);
  CHECK(out.exit_code == 0);
  const auto rep = parse_report(out);
  const auto& fam = rep["families"][0];
  CHECK(fam["solutions"].empty());
  CHECK(fam["singular_dimension"] == 0);
  CHECK(fam["completeness"]["pass"] == true);
}

TEST_CASE("spectrum reports the triple-product doublet and an empty family") {
  const char* triple = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "1", "2"],
    "weights": [[1], [1], [1]],
    "mu": [1]
  })";
  const auto out = run_problem("spectrum", triple);
  REQUIRE(out.exit_code == 0);
  const auto rep = parse_report(out);
  CHECK(rep["oracle_seed"] == 20240901);
  REQUIRE(rep["families"].size() == 1);
  const auto& fam = rep["families"][0];
  CHECK(fam["singular_dimension"] == 2);
  CHECK(fam["entries"].size() == 2);
  for (const auto& e : fam["entries"])
    for (const auto& r : e["residuals"]) CHECK(r.get<double>() <= 1e-8);

  const char* empty = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0"],
    "weights": [[2]],
    "mu": [0]
  })";
  const auto e = run_problem("spectrum", empty);
  CHECK(e.exit_code == 0);
  const auto erep = parse_report(e);
  CHECK(erep["families"][0]["singular_dimension"] == 0);
  CHECK(erep["families"][0]["entries"].empty());
}

TEST_CASE("miura of a single weight-two site is exact") {
  const char* text = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0"],
    "weights": [[2]],
    "bethe": {"w": [], "colors": []}
  })";
  const auto out = run_problem("miura", text);
  REQUIRE(out.exit_code == 0);
  const auto rep = parse_report(out);
  CHECK(rep["field"] == "rational");
  // u = 1/t composes to the projective connection 2/t^2
  const auto& q = rep["oper"]["fuchsian_q"];
  REQUIRE(q["poles"].size() == 1);
  CHECK(q["poles"][0]["at"] == "0");
  CHECK(q["poles"][0]["principal"] == njson::array({"0", "2"}));
  CHECK(rep["residues"][0]["c"] == "2");
  CHECK(rep["residues"][0]["mu"] == "0");
  CHECK(rep["residues"][0]["obstruction"] == "0");
  CHECK(rep["infinity_residues"]["c"] == "2");
  CHECK(rep["residue_sum"].get<double>() == 0.0);
}

TEST_CASE("miura with an inexact bethe root drops to complex arithmetic") {
  const char* text = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "1"],
    "weights": [[1], [1]],
    "bethe": {"w": [0.5], "colors": [1]}
  })";
  const auto out = run_problem("miura", text);
  REQUIRE(out.exit_code == 0);
  const auto rep = parse_report(out);
  CHECK(rep["field"] == "complex");
  CHECK(rep["bethe_points"][0]["regular"] == true);
  CHECK(rep["residues"][0]["mu"][0].get<double>() == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("miura rejects a bethe root that collides with a marked point") {
  const char* text = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "1"],
    "weights": [[1], [1]],
    "bethe": {"w": ["0"], "colors": [1]}
  })";
  CHECK(run_problem("miura", text).exit_code == 2);
}

TEST_CASE("overrides land in the echoed solver block") {
  CliOverrides ov;
  ov.seed = 99;
  ov.tol = 1e-10;
  ov.starts = 17;
  const auto rep = parse_report(run_problem("solve", kTwoSiteSinglet, ov));
  CHECK(rep["solver"]["seed"] == 99);
  CHECK(rep["solver"]["tol"] == 1e-10);
  CHECK(rep["solver"]["starts"] == 17);
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
  const auto first = run_problem("solve", kThreeSites);
  REQUIRE(first.exit_code == 0);
  const auto again = run_problem("solve", kThreeSites);
  CHECK(first.report == again.report);

  ::setenv("GAUDIN_THREADS", "4", 1);
  CHECK(thread_cap_from_env() == 4);
  const auto threaded = run_problem("solve", kThreeSites);
  ::setenv("GAUDIN_THREADS", "1", 1);
  const auto single = run_problem("solve", kThreeSites);
  ::unsetenv("GAUDIN_THREADS");
  CHECK(threaded.report == first.report);
  CHECK(single.report == first.report);

  const auto verified = run_problem("verify", kThreeSites);
  REQUIRE(verified.exit_code == 0);
  CHECK(run_problem("verify", kThreeSites).report == verified.report);
}

TEST_CASE("enumeration covers every admissible color multiset") {
  // no mu and no colors: families range over all dominant mu reachable from the top
  const char* text = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "1"],
    "weights": [[1], [1]]
  })";
  const auto rep = parse_report(run_problem("solve", text));
  REQUIRE(rep["families"].size() == 2);
  CHECK(rep["families"][0]["mu"] == njson::array({2}));
  CHECK(rep["families"][0]["colors"].empty());
  CHECK(rep["families"][1]["mu"] == njson::array({0}));
  CHECK(rep["families"][1]["colors"] == njson::array({1}));
  CHECK(rep["summary"]["solutions"] == 2);
}

TEST_CASE("lambda at infinity pins the color multiset") {
  const char* text = R"({
    "schema": 1,
    "algebra": {"type": "A", "rank": 1},
    "points": ["0", "1"],
    "weights": [[1], [1]],
    "lambda_infinity": [0]
  })";
  const auto rep = parse_report(run_problem("solve", text));
  REQUIRE(rep["families"].size() == 1);
  CHECK(rep["families"][0]["colors"] == njson::array({1}));
  CHECK(rep["families"][0]["infinity"]["lambda"] == njson::array({0}));
}
