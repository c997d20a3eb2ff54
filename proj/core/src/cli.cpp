#include "gaudin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <vector>

#include "json.hpp"

#include "gaudin/opers.hpp"
#include "gaudin/repmod.hpp"

namespace gaudin {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

long long rat_floor(const Rat& x) {
  const boost::multiprecision::cpp_int n = boost::multiprecision::numerator(x);
  const boost::multiprecision::cpp_int d = boost::multiprecision::denominator(x);
  boost::multiprecision::cpp_int q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q.convert_to<long long>();
}

ojson ser(const Rat& x) { return rat_to_string(x); }
ojson ser(const Cplx& x) { return ojson::array({x.real(), x.imag()}); }

ojson ser_weight(const Weight& w) {
  ojson a = ojson::array();
  for (int i = 0; i < w.rank(); ++i) a.push_back(rat_floor(w[i]));
  return a;
}

ojson ser_colors(const ColorAssignment& colors) {
  ojson a = ojson::array();
  for (int c : colors) a.push_back(c + 1);
  return a;
}

template <class F>
ojson ser_values(const std::vector<F>& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(ser(x));
  return a;
}

/// Partial-fraction form: "principal"[k] is the coefficient of (t-at)^-(k+1).
template <class F>
ojson ser_fun(const RationalFunction<F>& f) {
  ojson out;
  ojson poles = ojson::array();
  for (const auto& [x, cs] : f.poles()) {
    ojson p;
    p["at"] = ser(x);
    p["principal"] = ser_values(cs);
    poles.push_back(p);
  }
  out["poles"] = poles;
  out["polynomial"] = ser_values(f.polynomial_part());
  return out;
}

// ---------------------------------------------------------------- parsing

struct PointValue {
  bool exact = false;
  Rat r;
  Cplx c;
};

PointValue parse_point(const njson& j, const std::string& where) {
  PointValue p;
  if (j.is_string()) {
    try {
      p.r = rat_from_string(j.get<std::string>());
    } catch (const SchemaError& e) {
      bad(where, e.what());
    }
    p.exact = true;
  } else if (j.is_number_integer()) {
    p.r = Rat(j.get<long long>());
    p.exact = true;
  } else if (j.is_number()) {
    p.c = Cplx(j.get<double>(), 0.0);
  } else if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    p.c = Cplx(j[0].get<double>(), j[1].get<double>());
  } else {
    bad(where, "expected a rational string \"p/q\", a number, or [re, im]");
  }
  if (p.exact) p.c = FieldTraits<Cplx>::from_rat(p.r);
  return p;
}

Weight parse_weight(const njson& j, int rank, const std::string& where, bool dominant) {
  if (!j.is_array() || static_cast<int>(j.size()) != rank)
    bad(where, "expected an array of " + std::to_string(rank) + " integers");
  std::vector<Rat> c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_number_integer()) bad(at, "expected an integer");
    const long long v = j[i].get<long long>();
    if (dominant && v < 0) bad(at, "must be non-negative");
    if (v < -1000 || v > 1000) bad(at, "out of range");
    c.push_back(Rat(v));
  }
  return Weight(c);
}

ColorAssignment parse_colors(const njson& j, int rank, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of 1-based simple-root indices");
  if (j.size() > 64) throw CapExceededError(where + ": more than 64 Bethe variables");
  ColorAssignment out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_number_integer()) bad(at, "expected an integer");
    const long long v = j[i].get<long long>();
    if (v < 1 || v > rank) bad(at, "simple-root index must lie in [1, rank]");
    out.push_back(static_cast<int>(v) - 1);
  }
  return out;
}

struct ParsedProblem {
  bool exact = true;
  GaudinProblem<Rat> rp;  // meaningful only when exact
  GaudinProblem<Cplx> cp;
  std::optional<ColorAssignment> colors;  // 0-based, sorted
  std::optional<Weight> mu;
  bool has_bethe = false;
  bool bethe_exact = true;
  std::vector<Rat> bethe_w_rat;
  std::vector<Cplx> bethe_w;
  ColorAssignment bethe_colors;
  SolverConfig cfg;
  ojson echo;
};

ParsedProblem parse_problem(const std::string& text) {
  njson root;
  try {
    root = njson::parse(text);
  } catch (const njson::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) bad("$", "expected a JSON object");
  static const std::vector<std::string> allowed = {"schema", "algebra",         "points",
                                                   "weights", "colors",          "mu",
                                                   "bethe",   "lambda_infinity", "solver"};
  for (const auto& item : root.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      bad(item.key(), "unknown key");
  for (const char* req : {"schema", "algebra", "points", "weights"})
    if (!root.contains(req)) bad(req, "missing required key");
  if (!root["schema"].is_number_integer() || root["schema"].get<long long>() != 1)
    bad("schema", "expected the integer 1");

  const njson& alg = root["algebra"];
  if (!alg.is_object()) bad("algebra", "expected {\"type\": \"A\", \"rank\": n}");
  for (const auto& item : alg.items())
    if (item.key() != "type" && item.key() != "rank") bad("algebra." + item.key(), "unknown key");
  if (!alg.contains("type") || !alg["type"].is_string() || alg["type"].get<std::string>() != "A")
    bad("algebra.type", "only type \"A\" is supported");
  if (!alg.contains("rank") || !alg["rank"].is_number_integer())
    bad("algebra.rank", "expected an integer");
  const int rank = alg["rank"].get<int>();
  if (rank < 1 || rank > 8) bad("algebra.rank", "rank must lie in [1, 8]");

  ParsedProblem pp;
  const RootData rd = RootData::type_a(rank);
  pp.rp.rd = rd;
  pp.cp.rd = rd;

  const njson& pts = root["points"];
  if (!pts.is_array() || pts.empty()) bad("points", "expected a non-empty array");
  if (pts.size() > 16) throw CapExceededError("points: more than 16 marked points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PointValue v = parse_point(pts[i], "points[" + std::to_string(i) + "]");
    pp.exact = pp.exact && v.exact;
    pp.rp.points.push_back(v.r);
    pp.cp.points.push_back(v.c);
  }

  const njson& ws = root["weights"];
  if (!ws.is_array() || ws.size() != pts.size()) bad("weights", "expected one weight per point");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const Weight w = parse_weight(ws[i], rank, "weights[" + std::to_string(i) + "]", true);
    pp.rp.weights.push_back(w);
    pp.cp.weights.push_back(w);
  }

  if (root.contains("colors")) {
    ColorAssignment c = parse_colors(root["colors"], rank, "colors");
    std::sort(c.begin(), c.end());
    pp.colors = std::move(c);
  }
  if (root.contains("mu")) pp.mu = parse_weight(root["mu"], rank, "mu", false);
  if (root.contains("lambda_infinity")) {
    const Weight li = parse_weight(root["lambda_infinity"], rank, "lambda_infinity", true);
    pp.rp.weight_at_infinity = li;
    pp.cp.weight_at_infinity = li;
  }

  if (root.contains("bethe")) {
    const njson& b = root["bethe"];
    if (!b.is_object()) bad("bethe", "expected {\"w\": [...], \"colors\": [...]}");
    for (const auto& item : b.items())
      if (item.key() != "w" && item.key() != "colors") bad("bethe." + item.key(), "unknown key");
    if (!b.contains("w") || !b.contains("colors")) bad("bethe", "both w and colors are required");
    pp.bethe_colors = parse_colors(b["colors"], rank, "bethe.colors");
    if (!b["w"].is_array() || b["w"].size() != pp.bethe_colors.size())
      bad("bethe.w", "expected one value per color");
    for (std::size_t i = 0; i < b["w"].size(); ++i) {
      const PointValue v = parse_point(b["w"][i], "bethe.w[" + std::to_string(i) + "]");
      pp.bethe_exact = pp.bethe_exact && v.exact;
      pp.bethe_w_rat.push_back(v.r);
      pp.bethe_w.push_back(v.c);
    }
    pp.has_bethe = true;
  }

  if (root.contains("solver")) {
    const njson& s = root["solver"];
    if (!s.is_object()) bad("solver", "expected an object");
    static const std::vector<std::string> keys = {"seed", "starts", "tol",
                                                  "dedup", "max_iter", "collision"};
    for (const auto& item : s.items())
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
        bad("solver." + item.key(), "unknown key");
    if (s.contains("seed")) {
      if (!s["seed"].is_number_integer() || s["seed"].get<long long>() < 0)
        bad("solver.seed", "expected a non-negative integer");
      pp.cfg.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("starts")) {
      if (!s["starts"].is_number_integer() || s["starts"].get<long long>() < 0 ||
          s["starts"].get<long long>() > 100000)
        bad("solver.starts", "expected an integer in [0, 100000]");
      pp.cfg.starts = s["starts"].get<int>();
    }
    if (s.contains("tol")) {
      if (!s["tol"].is_number() || !(s["tol"].get<double>() > 0))
        bad("solver.tol", "expected a positive number");
      pp.cfg.tol = s["tol"].get<double>();
    }
    if (s.contains("dedup")) {
      if (!s["dedup"].is_number() || !(s["dedup"].get<double>() > 0))
        bad("solver.dedup", "expected a positive number");
      pp.cfg.dedup = s["dedup"].get<double>();
    }
    if (s.contains("max_iter")) {
      if (!s["max_iter"].is_number_integer() || s["max_iter"].get<long long>() < 1 ||
          s["max_iter"].get<long long>() > 10000)
        bad("solver.max_iter", "expected an integer in [1, 10000]");
      pp.cfg.max_iter = s["max_iter"].get<int>();
    }
    if (s.contains("collision")) {
      if (!s["collision"].is_number() || !(s["collision"].get<double>() > 0))
        bad("solver.collision", "expected a positive number");
      pp.cfg.collision = s["collision"].get<double>();
    }
  }

  if (pp.exact) pp.rp.validate();
  pp.cp.validate();

  ojson echo;
  echo["schema"] = 1;
  echo["algebra"] = ojson{{"type", "A"}, {"rank", rank}};
  ojson epts = ojson::array();
  for (std::size_t i = 0; i < pp.cp.points.size(); ++i)
    epts.push_back(pp.exact ? ser(pp.rp.points[i]) : ser(pp.cp.points[i]));
  echo["points"] = epts;
  ojson ewts = ojson::array();
  for (const auto& w : pp.cp.weights) ewts.push_back(ser_weight(w));
  echo["weights"] = ewts;
  if (pp.colors) echo["colors"] = ser_colors(*pp.colors);
  if (pp.mu) echo["mu"] = ser_weight(*pp.mu);
  if (pp.cp.weight_at_infinity) echo["lambda_infinity"] = ser_weight(*pp.cp.weight_at_infinity);
  if (pp.has_bethe) {
    ojson b;
    ojson bw = ojson::array();
    for (std::size_t i = 0; i < pp.bethe_w.size(); ++i)
      bw.push_back(pp.bethe_exact ? ser(pp.bethe_w_rat[i]) : ser(pp.bethe_w[i]));
    b["w"] = bw;
    b["colors"] = ser_colors(pp.bethe_colors);
    echo["bethe"] = b;
  }
  pp.echo = std::move(echo);
  return pp;
}

// ------------------------------------------------- families and enumeration

struct Family {
  ColorAssignment colors;
  Weight mu;
};

std::vector<std::vector<int>> admissible_multisets(const RootData& rd,
                                                   const std::vector<Weight>& lambdas,
                                                   const std::optional<Weight>& lambda_inf) {
  Weight total = Weight::zero(rd.rank);
  for (const auto& l : lambdas) total = total + l;
  std::vector<std::vector<int>> out;
  if (lambda_inf) {
    // sum of roots is pinned to total - dual(lambda_inf)
    const Weight mu = dual_weight(rd, *lambda_inf);
    const auto rc = rd.root_coords(total - mu);
    std::vector<int> m(rd.rank);
    for (int i = 0; i < rd.rank; ++i) {
      if (rc[i] < 0) return out;
      const long long f = rat_floor(rc[i]);
      if (Rat(f) != rc[i]) return out;
      m[i] = static_cast<int>(f);
    }
    out.push_back(std::move(m));
    return out;
  }
  const auto rc = rd.root_coords(total);
  std::vector<long long> bound(rd.rank);
  long long combos = 1;
  for (int i = 0; i < rd.rank; ++i) {
    bound[i] = std::max<long long>(rat_floor(rc[i]), 0);
    combos *= bound[i] + 1;
    if (combos > 4096) throw CapExceededError("too many color multisets to enumerate");
  }
  std::vector<int> m(rd.rank, 0);
  while (true) {
    Weight mu = total;
    for (int i = 0; i < rd.rank; ++i)
      if (m[i] > 0) mu = mu - rd.simple_root(i) * Rat(m[i]);
    if (mu.is_dominant_integral()) out.push_back(m);
    int i = 0;
    while (i < rd.rank && m[i] == bound[i]) m[i++] = 0;
    if (i == rd.rank) break;
    ++m[i];
  }
  std::sort(out.begin(), out.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    int sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return out;
}

std::vector<Family> make_families(const ParsedProblem& pp) {
  std::vector<Family> fams;
  const RootData& rd = pp.cp.rd;
  if (pp.colors) {
    Family f;
    f.colors = *pp.colors;
    f.mu = solution_weight(pp.cp, f.colors);
    if (pp.mu && !(*pp.mu == f.mu)) bad("mu", "inconsistent with the requested colors");
    fams.push_back(std::move(f));
    return fams;
  }
  if (pp.mu) {
    // an explicit weight pins the color multiset; unreachable weights yield no family
    Weight total = Weight::zero(rd.rank);
    for (const auto& l : pp.cp.weights) total = total + l;
    const auto rc = rd.root_coords(total - *pp.mu);
    Family f;
    for (int i = 0; i < rd.rank; ++i) {
      if (rc[i] < 0) return fams;
      const long long m = rat_floor(rc[i]);
      if (Rat(m) != rc[i]) return fams;
      for (long long k = 0; k < m; ++k) f.colors.push_back(i);
    }
    f.mu = *pp.mu;
    fams.push_back(std::move(f));
    return fams;
  }
  for (const auto& m : admissible_multisets(rd, pp.cp.weights, pp.cp.weight_at_infinity)) {
    Family f;
    for (int i = 0; i < rd.rank; ++i)
      for (int k = 0; k < m[i]; ++k) f.colors.push_back(i);
    f.mu = solution_weight(pp.cp, f.colors);
    fams.push_back(std::move(f));
  }
  return fams;
}

double kappa_pair_cached() {
  static const double k = fit_kappa_pair();
  return k;
}

// -------------------------------------------------------- numeric helpers

double vec_norm(const std::vector<Cplx>& v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

double singular_residual(const GaudinProblem<Cplx>& p, const TensorRep& t,
                         const std::vector<Cplx>& phi) {
  const double n = vec_norm(phi);
  if (!(n > 0)) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int i = 0; i < p.rd.rank; ++i) {
    std::vector<Cplx> img(static_cast<std::size_t>(t.dim()), Cplx(0));
    for (int s = 0; s < t.sites(); ++s) {
      const auto part = t.site_matrix(s, t.factor(s).raising(i)).cast<Cplx>().apply(phi);
      for (std::size_t r = 0; r < img.size(); ++r) img[r] += part[r];
    }
    worst = std::max(worst, vec_norm(img) / n);
  }
  return worst;
}

double eigen_residual(const GaudinProblem<Cplx>& p, const TensorRep& t,
                      const std::vector<Cplx>& phi, const std::vector<Cplx>& theta) {
  const double n = vec_norm(phi);
  if (!(n > 0)) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int i = 0; i < p.sites(); ++i) {
    auto img = gaudin_hamiltonian(p, t, i).apply(phi);
    for (std::size_t r = 0; r < img.size(); ++r) img[r] -= theta[static_cast<std::size_t>(i)] * phi[r];
    worst = std::max(worst, vec_norm(img) / n);
  }
  return worst;
}

std::string fmt_c(const Cplx& z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

std::string fmt_d(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// ----------------------------------------------------------- per-solution

struct CheckSet {
  ojson record = ojson::object();
  bool pass = true;

  void add(const std::string& name, double value, double tol) {
    ojson c;
    c["value"] = value;
    c["tolerance"] = tol;
    const bool ok = value <= tol;
    c["pass"] = ok;
    record[name] = c;
    pass = pass && ok;
  }
};

ojson family_header(const ParsedProblem& pp, const Family& fam) {
  ojson jf;
  jf["colors"] = ser_colors(fam.colors);
  jf["mu"] = ser_weight(fam.mu);
  const auto cls = classify_weight_at_infinity(pp.cp.rd, fam.mu);
  if (cls) {
    ojson inf;
    inf["lambda"] = ser_weight(cls->lambda_infinity);
    ojson word = ojson::array();
    for (int s : cls->w.word) word.push_back(s + 1);
    inf["weyl_word"] = word;
    jf["infinity"] = inf;
  } else {
    jf["infinity"] = nullptr;
  }
  return jf;
}

/// Shared solve/verify record for one Bethe root; verify adds the check set
/// and the oracle comparison.
ojson solution_record(const ParsedProblem& pp, const Family& fam, const BetheSolution<Cplx>& s,
                      bool verify, const TensorRep* t, const SpectrumRecord* oracle,
                      double tol_resid, bool injected, bool* pass_out) {
  const GaudinProblem<Cplx>& p = pp.cp;
  ojson rec;
  rec["w"] = ser_values(s.w);
  rec["residual"] = s.residual;
  if (!injected) {
    rec["jacobian_condition"] = s.jacobian_condition;
    rec["possibly_degenerate"] = s.possibly_degenerate;
  } else {
    rec["injected"] = true;
  }

  const auto pred = predicted_eigenvalues(p, s, kappa_pair_cached());
  rec["predicted"] = ser_values(pred.miura);
  Cplx total(0);
  for (const auto& x : pred.miura) total += x;
  double closed_delta = 0.0;
  if (!pred.closed_form.empty()) {
    rec["closed_form"] = ser_values(pred.closed_form);
    for (std::size_t i = 0; i < pred.miura.size(); ++i)
      closed_delta = std::max(closed_delta, std::abs(pred.miura[i] - pred.closed_form[i]));
    rec["closed_form_delta"] = closed_delta;
  }
  rec["residue_sum"] = std::abs(total);

  const auto oper = miura_oper(p, s);
  ojson regs = ojson::array();
  double reg_worst = 0.0;
  for (const auto& w : s.w) {
    const auto r = regularity_check(oper, w);
    regs.push_back(r.regular);
    reg_worst = std::max(reg_worst, r.worst);
  }
  rec["regular"] = regs;
  rec["regularity_worst"] = reg_worst;

  const auto rinf = oper_residues_at_infinity(oper);
  ojson jinf;
  jinf["c"] = ser(rinf.c);
  jinf["mu"] = ser(rinf.mu);
  rec["infinity_residues"] = jinf;

  double obstruction_worst = 0.0;
  if (p.rd.rank == 1) {
    ojson obs = ojson::array();
    for (int i = 0; i < p.sites(); ++i) {
      const int lam = static_cast<int>(rat_floor(p.weights[static_cast<std::size_t>(i)][0]));
      const Cplx val = frobenius_obstruction(oper, p.points[static_cast<std::size_t>(i)], lam);
      obs.push_back(ser(val));
      obstruction_worst = std::max(obstruction_worst, std::abs(val));
    }
    rec["obstructions"] = obs;
  }

  if (verify) {
    CheckSet checks;
    checks.add("bae_residual", s.residual, tol_resid);
    checks.add("residue_sum", std::abs(total), 1e-10);
    checks.add("regularity_worst", reg_worst, 1e-9);
    if (p.rd.rank == 1) {
      checks.add("obstruction_worst", obstruction_worst, 1e-9);
      checks.add("closed_form_delta", closed_delta, 1e-8);
    }

    const auto cls = classify_weight_at_infinity(p.rd, fam.mu);
    if (p.rd.rank == 1 && cls) {
      const Rat li = cls->lambda_infinity[0];
      const double expect = rat_to_double(li * (li + 2) / 4);
      checks.add("infinity_residue_delta", std::abs(rinf.c - Cplx(expect)),
                 1e-8 * std::max(1.0, std::abs(expect)));
    }

    if (oracle) {
      double best = std::numeric_limits<double>::infinity();
      long long best_idx = -1;
      double scale = 1.0;
      for (std::size_t e = 0; e < oracle->entries.size(); ++e) {
        double worst = 0.0;
        for (std::size_t i = 0; i < pred.miura.size(); ++i) {
          worst = std::max(worst, std::abs(oracle->entries[e].values[i] - pred.miura[i]));
          scale = std::max(scale, std::abs(oracle->entries[e].values[i]));
        }
        if (worst < best) {
          best = worst;
          best_idx = static_cast<long long>(e);
        }
      }
      rec["oracle_entry"] = best_idx;
      checks.add("oracle_delta", oracle->entries.empty() ? 1.0 / 0.0 : best / scale, 1e-8);
    }

    if (t && s.w.size() <= 8) {
      const auto phi = bethe_vector(p, s, *t);
      checks.add("singular_residual", singular_residual(p, *t, phi), 1e-10);
      checks.add("eigenvector_residual", eigen_residual(p, *t, phi, pred.miura), 1e-8);
    } else if (t) {
      rec["vector"] = "skipped: more than 8 Bethe variables";
    }

    rec["checks"] = checks.record;
    rec["pass"] = checks.pass;
    if (pass_out) *pass_out = checks.pass;
  }
  return rec;
}

ojson collision_record(const BetheSolution<Cplx>& s) {
  ojson rec;
  rec["w"] = ser_values(s.w);
  rec["residual"] = s.residual;
  return rec;
}

// ---------------------------------------------------------------- commands

void header(ojson& rep, const char* command, const ParsedProblem& pp, const SolverConfig& cfg,
            bool with_solver) {
  rep["schema"] = 1;
  rep["command"] = command;
  rep["input"] = pp.echo;
  if (with_solver) {
    ojson s;
    s["seed"] = cfg.seed;
    s["starts"] = cfg.starts;
    s["tol"] = cfg.tol;
    s["dedup"] = cfg.dedup;
    s["max_iter"] = cfg.max_iter;
    rep["solver"] = s;
  }
  if (pp.cp.rd.rank == 1) rep["kappa_pair"] = kappa_pair_cached();
}

SolverConfig effective_config(const ParsedProblem& pp, const CliOverrides& ov) {
  SolverConfig cfg = pp.cfg;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.tol) cfg.tol = *ov.tol;
  if (ov.starts) cfg.starts = *ov.starts;
  cfg.threads = thread_cap_from_env();
  return cfg;
}

std::optional<TensorRep> try_tensor(const ParsedProblem& pp) {
  try {
    return tensor_irreducibles(pp.cp.rd, pp.cp.weights);
  } catch (const CapExceededError&) {
    return std::nullopt;
  }
}

int cmd_solve_verify(const ParsedProblem& pp, const CliOverrides& ov, bool verify, ojson& rep,
                     std::string& table) {
  const SolverConfig cfg = effective_config(pp, ov);
  header(rep, verify ? "verify" : "solve", pp, cfg, true);

  std::optional<TensorRep> t = try_tensor(pp);
  if (verify && !t) throw CapExceededError("tensor space too large for the verification oracle");

  const auto fams = make_families(pp);
  ojson jfams = ojson::array();
  std::size_t total_solutions = 0, total_collisions = 0, degenerate = 0, failed = 0;
  std::string tbl = std::string(verify ? "verify" : "solve") + "  A" +
                    std::to_string(pp.cp.rd.rank) + "  sites " + std::to_string(pp.cp.sites()) +
                    "  seed " + std::to_string(cfg.seed) + "\n";

  for (const auto& fam : fams) {
    ojson jf = family_header(pp, fam);
    std::optional<std::size_t> dim;
    if (t) dim = singular_space(*t, fam.mu).size();
    if (dim)
      jf["singular_dimension"] = *dim;
    else
      jf["singular_dimension"] = nullptr;

    const SolveResult sr = solve_bae(pp.cp, fam.colors, cfg);
    jf["converged_starts"] = sr.converged_starts;

    SpectrumRecord oracle;
    if (verify) {
      oracle = pp.exact ? joint_spectrum(pp.rp, *t, fam.mu) : joint_spectrum(pp.cp, *t, fam.mu);
      ojson jo = ojson::array();
      for (const auto& e : oracle.entries) {
        ojson je;
        je["values"] = ser_values(e.values);
        je["residuals"] = e.residuals;
        jo.push_back(je);
      }
      jf["oracle"] = jo;
      if (oracle.possibly_degenerate) jf["oracle_possibly_degenerate"] = true;
    }

    bool family_pass = true;
    ojson jsols = ojson::array();
    for (const auto& s : sr.solutions) {
      bool pass = true;
      jsols.push_back(solution_record(pp, fam, s, verify, t ? &*t : nullptr,
                                      verify ? &oracle : nullptr, cfg.tol, false, &pass));
      family_pass = family_pass && pass;
      if (s.possibly_degenerate) ++degenerate;
    }
    if (verify && ov.perturb > 0.0) {
      for (const auto& s : sr.solutions) {
        if (s.w.empty()) continue;
        BetheSolution<Cplx> sp = s;
        for (auto& w : sp.w) w += ov.perturb;
        const std::vector<Cplx> r = bae_residual(pp.cp, sp);
        double rn = 0.0;
        for (const auto& x : r) rn = std::max(rn, std::abs(x));
        sp.residual = rn;
        bool pass = true;
        jsols.push_back(
            solution_record(pp, fam, sp, true, &*t, &oracle, cfg.tol, true, &pass));
        family_pass = family_pass && pass;
      }
    }
    jf["solutions"] = jsols;
    ojson jcols = ojson::array();
    for (const auto& c : sr.collisions) jcols.push_back(collision_record(c));
    jf["collisions"] = jcols;

    if (verify) {
      ojson comp;
      comp["found"] = sr.solutions.size();
      if (dim) {
        comp["expected"] = *dim;
        const bool ok = sr.solutions.size() == *dim;
        comp["pass"] = ok;
        family_pass = family_pass && ok;
      } else {
        comp["expected"] = nullptr;
      }
      jf["completeness"] = comp;
      jf["pass"] = family_pass;
      if (!family_pass) ++failed;
    }

    total_solutions += sr.solutions.size();
    total_collisions += sr.collisions.size();
    jfams.push_back(std::move(jf));

    tbl += "family colors=" + ser_colors(fam.colors).dump() + " mu=" + ser_weight(fam.mu).dump() +
           " dim=" + (dim ? std::to_string(*dim) : std::string("?")) +
           " solutions=" + std::to_string(sr.solutions.size());
    if (verify) tbl += family_pass ? "  PASS" : "  FAIL";
    tbl += "\n";
    for (std::size_t k = 0; k < sr.solutions.size(); ++k) {
      const auto& s = sr.solutions[k];
      tbl += "  #" + std::to_string(k) + " residual=" + fmt_d(s.residual) + " w:";
      for (const auto& w : s.w) tbl += " " + fmt_c(w);
      tbl += "\n";
    }
  }

  rep["families"] = jfams;
  ojson sum;
  sum["families"] = fams.size();
  sum["solutions"] = total_solutions;
  sum["collisions"] = total_collisions;
  sum["possibly_degenerate"] = degenerate;
  if (verify) sum["families_failed"] = failed;
  rep["summary"] = sum;
  table = tbl;
  return verify && failed > 0 ? 1 : 0;
}

int cmd_spectrum(const ParsedProblem& pp, const CliOverrides& ov, ojson& rep,
                 std::string& table) {
  header(rep, "spectrum", pp, pp.cfg, false);
  const std::uint64_t seed = ov.seed ? *ov.seed : 20240901u;
  rep["oracle_seed"] = seed;

  std::vector<Weight> mus;
  if (pp.mu) {
    mus.push_back(*pp.mu);
  } else if (pp.colors) {
    mus.push_back(solution_weight(pp.cp, *pp.colors));
  } else {
    for (const auto& fam : make_families(pp)) mus.push_back(fam.mu);
  }

  const TensorRep t = tensor_irreducibles(pp.cp.rd, pp.cp.weights);
  ojson jfams = ojson::array();
  std::string tbl = "spectrum  A" + std::to_string(pp.cp.rd.rank) + "  dim " +
                    std::to_string(t.dim()) + "\n";
  std::size_t total_entries = 0;
  for (const auto& mu : mus) {
    const SpectrumRecord rec =
        pp.exact ? joint_spectrum(pp.rp, t, mu, seed) : joint_spectrum(pp.cp, t, mu, seed);
    ojson jf;
    jf["mu"] = ser_weight(mu);
    jf["singular_dimension"] = rec.singular_dim;
    jf["possibly_degenerate"] = rec.possibly_degenerate;
    jf["retried"] = rec.retried;
    ojson entries = ojson::array();
    for (const auto& e : rec.entries) {
      ojson je;
      je["values"] = ser_values(e.values);
      je["residuals"] = e.residuals;
      entries.push_back(je);
    }
    jf["entries"] = entries;
    jfams.push_back(jf);
    total_entries += rec.entries.size();
    tbl += "mu=" + ser_weight(mu).dump() + " dim=" + std::to_string(rec.singular_dim) + "\n";
    for (const auto& e : rec.entries) {
      tbl += "  values:";
      for (const auto& v : e.values) tbl += " " + fmt_c(v);
      tbl += "\n";
    }
  }
  rep["families"] = jfams;
  ojson sum;
  sum["families"] = mus.size();
  sum["entries"] = total_entries;
  rep["summary"] = sum;
  table = tbl;
  return 0;
}

template <class F>
void miura_body(const GaudinProblem<F>& p, const BetheSolution<F>& s, ojson& rep,
                std::string& table) {
  const auto conn = cartan_connection(p, s);
  const auto u = connection_components(conn);
  const auto oper = miura_sln(u);

  ojson jconn;
  ojson comps = ojson::array();
  for (int i = 0; i < p.rd.rank; ++i) comps.push_back(ser_fun(conn.component(i)));
  jconn["components"] = comps;
  ojson eps = ojson::array();
  for (const auto& uk : u) eps.push_back(ser_fun(uk));
  jconn["epsilon_components"] = eps;
  rep["connection"] = jconn;

  ojson joper;
  joper["rank"] = oper.rank;
  ojson vs = ojson::array();
  for (const auto& vk : oper.v) vs.push_back(ser_fun(vk));
  joper["v"] = vs;
  if (oper.rank == 2) joper["fuchsian_q"] = ser_fun(-oper.v[0]);
  rep["oper"] = joper;

  F residue_total(0);
  ojson marked = ojson::array();
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const auto r = oper_residues(oper, p.points[i]);
    ojson jr;
    jr["at"] = ser(p.points[i]);
    jr["c"] = ser(r.c);
    jr["mu"] = ser(r.mu);
    residue_total = residue_total + r.mu;
    if (p.rd.rank == 1) {
      const int lam = static_cast<int>(rat_floor(p.weights[i][0]));
      jr["obstruction"] = ser(frobenius_obstruction(oper, p.points[i], lam));
    }
    marked.push_back(jr);
  }
  rep["residues"] = marked;

  ojson bpts = ojson::array();
  for (const auto& w : s.w) {
    const auto r = regularity_check(oper, w);
    ojson jr;
    jr["at"] = ser(w);
    jr["regular"] = r.regular;
    jr["singular_magnitude"] = r.worst;
    residue_total = residue_total - oper.v[0].residue(w);
    if (p.rd.rank == 1) jr["obstruction"] = ser(frobenius_obstruction(oper, w, 0));
    bpts.push_back(jr);
  }
  rep["bethe_points"] = bpts;

  const auto rinf = oper_residues_at_infinity(oper);
  ojson jinf;
  jinf["c"] = ser(rinf.c);
  jinf["mu"] = ser(rinf.mu);
  rep["infinity_residues"] = jinf;
  rep["residue_sum"] = FieldTraits<F>::magnitude(residue_total);

  table += "miura  rank " + std::to_string(oper.rank) + "  bethe points " +
           std::to_string(s.w.size()) + "\n";
  for (const auto& jr : marked)
    table += "  at " + jr["at"].dump() + "  c=" + jr["c"].dump() + "  mu=" + jr["mu"].dump() + "\n";
}

int cmd_miura(const ParsedProblem& pp, ojson& rep, std::string& table) {
  header(rep, "miura", pp, pp.cfg, false);
  if (pp.exact && (!pp.has_bethe || pp.bethe_exact)) {
    BetheSolution<Rat> s;
    s.w = pp.bethe_w_rat;
    s.colors = pp.bethe_colors;
    rep["field"] = "rational";
    miura_body(pp.rp, s, rep, table);
  } else {
    BetheSolution<Cplx> s;
    s.w = pp.bethe_w;
    s.colors = pp.bethe_colors;
    rep["field"] = "complex";
    miura_body(pp.cp, s, rep, table);
  }
  return 0;
}

void fill_error(ojson& rep, const std::string& command, int code, const std::string& message) {
  rep = ojson();
  rep["schema"] = 1;
  rep["command"] = command;
  ojson err;
  err["exit_code"] = code;
  err["message"] = message;
  rep["error"] = err;
}

}  // namespace

int thread_cap_from_env() {
  const char* e = std::getenv("GAUDIN_THREADS");
  if (!e || !*e) return 1;
  char* end = nullptr;
  const long v = std::strtol(e, &end, 10);
  if (end == e || v < 1) return 1;
  return static_cast<int>(std::min<long>(v, 64));
}

CliOutcome run_problem(const std::string& command, const std::string& problem_text,
                       const CliOverrides& overrides) {
  CliOutcome out;
  ojson rep;
  try {
    if (command != "solve" && command != "verify" && command != "spectrum" &&
        command != "miura")
      throw SchemaError("command: expected solve, verify, spectrum or miura");
    const ParsedProblem pp = parse_problem(problem_text);
    if (command == "solve")
      out.exit_code = cmd_solve_verify(pp, overrides, false, rep, out.table);
    else if (command == "verify")
      out.exit_code = cmd_solve_verify(pp, overrides, true, rep, out.table);
    else if (command == "spectrum")
      out.exit_code = cmd_spectrum(pp, overrides, rep, out.table);
    else
      out.exit_code = cmd_miura(pp, rep, out.table);
  } catch (const SchemaError& e) {
    fill_error(rep, command, 2, e.what());
    out.exit_code = 2;
    out.table = std::string("error: ") + e.what() + "\n";
  } catch (const CapExceededError& e) {
    fill_error(rep, command, 3, e.what());
    out.exit_code = 3;
    out.table = std::string("error: ") + e.what() + "\n";
  } catch (const DegenerateInputError& e) {
    fill_error(rep, command, 2, e.what());
    out.exit_code = 2;
    out.table = std::string("error: ") + e.what() + "\n";
  } catch (const Error& e) {
    fill_error(rep, command, 1, e.what());
    out.exit_code = 1;
    out.table = std::string("error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    fill_error(rep, command, 1, e.what());
    out.exit_code = 1;
    out.table = std::string("error: ") + e.what() + "\n";
  }
  out.report = rep.dump(2) + "\n";
  return out;
}

}  // namespace gaudin
