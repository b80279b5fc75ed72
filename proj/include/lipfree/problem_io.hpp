#pragma once

// Problem-file schema (UTF-8 JSON in), full analysis report (JSON/text out)
// and the replayable counterexample dump format.  Key order and value
// formatting are deterministic so reports are byte-stable.

#include <json.hpp>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lipfree/metric_space.hpp"
#include "lipfree/spectrum.hpp"

namespace lipfree {

using json = nlohmann::json;

struct Problem {
  SpacePtr space;
  SelfMap f;
  Weight w;
};

namespace io_detail {

inline cx parse_complex(const json& value, const std::string& what) {
  if (value.is_number()) return cx(value.get<double>(), 0.0);
  if (value.is_array() && value.size() == 2 && value[0].is_number() &&
      value[1].is_number())
    return cx(value[0].get<double>(), value[1].get<double>());
  throw schema_error(what + " must be a number or an [re, im] pair");
}

inline json dump_complex(cx z) { return json::array({z.real(), z.imag()}); }

}  // namespace io_detail

// Parses and structurally checks a problem file; metric axioms are not
// checked here (validate_metric owns that).
inline Problem load_problem(const json& file) {
  if (!file.is_object()) throw schema_error("problem file must be a JSON object");
  if (!file.contains("metric") || !file["metric"].is_object())
    throw schema_error("missing metric object");
  const json& metric = file["metric"];
  if (!metric.contains("kind") || !metric["kind"].is_string())
    throw schema_error("metric.kind must be a string");
  const std::string kind = metric["kind"].get<std::string>();

  Problem problem;
  std::vector<std::string> points;
  if (file.contains("points")) {
    if (!file["points"].is_array()) throw schema_error("points must be an array");
    for (const auto& p : file["points"]) {
      if (!p.is_string()) throw schema_error("point ids must be strings");
      points.push_back(p.get<std::string>());
    }
    for (size_t i = 0; i < points.size(); ++i)
      for (size_t j = i + 1; j < points.size(); ++j)
        if (points[i] == points[j])
          throw schema_error("duplicate point id: " + points[i]);
  }

  if (kind == "matrix") {
    if (points.empty()) throw schema_error("matrix metric needs a points array");
    if (!file.contains("base") || !file["base"].is_string())
      throw schema_error("matrix metric needs a base id");
    const std::string base_id = file["base"].get<std::string>();
    int base = -1;
    for (size_t i = 0; i < points.size(); ++i)
      if (points[i] == base_id) base = static_cast<int>(i);
    if (base < 0) throw schema_error("base id is not a point");
    if (!metric.contains("d") || !metric["d"].is_array())
      throw schema_error("matrix metric needs a square array d");
    std::vector<std::vector<double>> d;
    for (const auto& row : metric["d"]) {
      if (!row.is_array() || row.size() != points.size())
        throw schema_error("metric matrix rows must match the point count");
      std::vector<double> r;
      for (const auto& v : row) {
        if (!v.is_number()) throw schema_error("distances must be numbers");
        r.push_back(v.get<double>());
      }
      d.push_back(std::move(r));
    }
    if (d.size() != points.size())
      throw schema_error("metric matrix must be square");
    problem.space = PointedMetricSpace::explicit_matrix(points, base, d);
  } else if (kind == "sum_radial") {
    if (!metric.contains("rho") || !metric["rho"].is_array())
      throw schema_error("sum_radial metric needs a rho array");
    std::vector<double> rho;
    for (const auto& v : metric["rho"]) {
      if (!v.is_number()) throw schema_error("radii must be numbers");
      rho.push_back(v.get<double>());
    }
    try {
      problem.space = PointedMetricSpace::sum_radial(rho);
    } catch (const std::invalid_argument& e) {
      throw schema_error(e.what());
    }
  } else if (kind == "geometric" || kind == "shift") {
    if (!metric.contains("n") || !metric["n"].is_number_integer())
      throw schema_error(kind + " metric needs an integer n");
    const int n = metric["n"].get<int>();
    try {
      if (kind == "geometric") {
        if (!metric.contains("lambda_abs") || !metric["lambda_abs"].is_number())
          throw schema_error("geometric metric needs lambda_abs");
        problem.space =
            PointedMetricSpace::geometric(metric["lambda_abs"].get<double>(), n);
      } else {
        problem.space = PointedMetricSpace::shift(n);
      }
    } catch (const std::invalid_argument& e) {
      throw schema_error(e.what());
    }
  } else {
    throw schema_error("unknown metric kind: " + kind);
  }

  if (!points.empty() && kind != "matrix") {
    if (static_cast<int>(points.size()) != problem.space->size())
      throw schema_error("points array does not match the generated space");
    for (int i = 0; i < problem.space->size(); ++i)
      if (points[i] != problem.space->name(i))
        throw schema_error("generated spaces use ids \"0\", \"1\", ...");
  }

  const auto index_of = [&](const std::string& id) {
    for (int i = 0; i < problem.space->size(); ++i)
      if (problem.space->name(i) == id) return i;
    throw schema_error("unknown point id: " + id);
  };

  if (!file.contains("map") || !file["map"].is_object())
    throw schema_error("missing map table");
  problem.f.image.assign(problem.space->size(), -1);
  for (const auto& [from, to] : file["map"].items()) {
    if (!to.is_string()) throw schema_error("map values must be point ids");
    problem.f.image[index_of(from)] = index_of(to.get<std::string>());
  }
  for (int i = 0; i < problem.space->size(); ++i)
    if (problem.f.image[i] < 0)
      throw schema_error("map is missing an entry for point " +
                         problem.space->name(i));

  problem.w.values.assign(problem.space->size(), cx(1.0, 0.0));
  problem.w.zero_tol = 0.0;
  bool base_weight_given = false;
  if (file.contains("weight")) {
    if (!file["weight"].is_object()) throw schema_error("weight must be a table");
    for (const auto& [id, value] : file["weight"].items()) {
      const int idx = index_of(id);
      problem.w.values[idx] = io_detail::parse_complex(value, "weight of " + id);
      if (idx == problem.space->base_index()) base_weight_given = true;
    }
  }
  // Base weight defaults to whatever keeps the operator admissible.
  const int base = problem.space->base_index();
  if (!base_weight_given && problem.f(base) != base) problem.w.values[base] = 0.0;
  return problem;
}

inline json problem_to_json(const Problem& problem) {
  const auto& space = *problem.space;
  json out;
  out["points"] = json::array();
  for (int i = 0; i < space.size(); ++i) out["points"].push_back(space.name(i));
  out["base"] = space.name(space.base_index());
  const MetricDescriptor& desc = space.descriptor();
  switch (desc.kind) {
    case MetricKind::Explicit: {
      json rows = json::array();
      for (int i = 0; i < space.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < space.size(); ++j) row.push_back(space.dist(i, j));
        rows.push_back(std::move(row));
      }
      out["metric"] = {{"kind", "matrix"}, {"d", std::move(rows)}};
      break;
    }
    case MetricKind::SumRadial:
      out["metric"] = {{"kind", "sum_radial"}, {"rho", desc.rho}};
      break;
    case MetricKind::Geometric:
      out["metric"] = {{"kind", "geometric"},
                       {"lambda_abs", desc.lambda_abs},
                       {"n", desc.n}};
      break;
    case MetricKind::Shift:
      out["metric"] = {{"kind", "shift"}, {"n", desc.n}};
      break;
  }
  json map = json::object();
  for (int i = 0; i < space.size(); ++i)
    map[space.name(i)] = space.name(problem.f(i));
  out["map"] = std::move(map);
  json weight = json::object();
  for (int i = 0; i < space.size(); ++i)
    weight[space.name(i)] = io_detail::dump_complex(problem.w(i));
  out["weight"] = std::move(weight);
  return out;
}

struct AnalysisOptions {
  bool oracle = true;
  int gelfand_terms = 0;  // 0 disables the sequence
};

namespace io_detail {

inline json eigenvalue_entry(cx value) {
  json e;
  e["value"] = dump_complex(value);
  e["modulus"] = std::abs(value);
  e["argument"] = std::arg(value);
  return e;
}

inline FreeVector seeded_vector(const SpacePtr& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> point(0, space->size() - 1);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  FreeVector v(space);
  const int terms = 1 + static_cast<int>(rng() % 6);
  for (int t = 0; t < terms; ++t)
    v.add(point(rng), cx(value(rng), value(rng)));
  return v;
}

}  // namespace io_detail

// Full machine-readable report; assumes the metric validated and the
// operator built.
inline json analyze_report(const Problem& problem, const WeightedLipOperator& op,
                           const AnalysisOptions& options) {
  const auto& space = *problem.space;
  json report;
  report["schema_version"] = 1;

  json prob;
  prob["point_count"] = space.size();
  prob["base"] = "0";
  prob["base_id"] = space.name(space.base_index());
  switch (space.descriptor().kind) {
    case MetricKind::Explicit: prob["metric_kind"] = "matrix"; break;
    case MetricKind::SumRadial: prob["metric_kind"] = "sum_radial"; break;
    case MetricKind::Geometric: prob["metric_kind"] = "geometric"; break;
    case MetricKind::Shift: prob["metric_kind"] = "shift"; break;
  }
  report["problem"] = std::move(prob);
  report["validation"] = {{"valid", true}, {"violations", json::array()}};

  const auto& bc = op.boundedness();
  report["boundedness"] = {
      {"A", bc.A},
      {"B", bc.B},
      {"witness_A", {space.report_name(bc.witness_A.first),
                     space.report_name(bc.witness_A.second)}},
      {"witness_B", {space.report_name(bc.witness_B.first),
                     space.report_name(bc.witness_B.second)}}};

  const NormInterval norm = op.operator_norm();
  report["operator_norm"] = {{"lo", norm.lo}, {"hi", norm.hi}};

  const SpectrumReport spectrum = point_spectrum(op, options.oracle);

  json cycles = json::array();
  for (const Cycle& c : spectrum.decomposition.cycles) {
    json jc;
    json pts = json::array();
    for (int p : c.points) pts.push_back(space.report_name(p));
    jc["points"] = std::move(pts);
    jc["length"] = c.length();
    jc["weight_product"] = io_detail::dump_complex(c.weight_product);
    jc["contains_base"] = c.contains_base;
    jc["weights_nonzero"] = c.weights_nonzero;
    cycles.push_back(std::move(jc));
  }
  report["cycles"] = std::move(cycles);
  json tails = json::array();
  for (const Tail& t : spectrum.decomposition.tails)
    tails.push_back({{"point", space.report_name(t.point)},
                     {"entry_distance", t.entry_distance}});
  report["tails"] = std::move(tails);

  json ps;
  json nonzero = json::array();
  for (const CycleEigenvalue& e : spectrum.cycle_eigenvalues) {
    json entry = io_detail::eigenvalue_entry(e.value);
    entry["cycle"] = e.cycle_index;
    nonzero.push_back(std::move(entry));
  }
  ps["nonzero"] = std::move(nonzero);
  ps["zero"] = {{"in_point_spectrum", spectrum.zero.in_point_spectrum},
                {"reasons", spectrum.zero.reasons}};
  ps["unweighted"] = spectrum.unweighted;
  ps["cycle_length_set"] = spectrum.cycle_length_set;
  if (spectrum.unweighted) {
    json roots = json::array();
    for (const cx& r : spectrum.roots_of_unity)
      roots.push_back(io_detail::eigenvalue_entry(r));
    ps["roots_of_unity"] = std::move(roots);
  }
  report["point_spectrum"] = std::move(ps);

  if (spectrum.oracle_ran) {
    json oracle = json::array();
    for (const cx& l : spectrum.oracle_eigenvalues)
      oracle.push_back(io_detail::eigenvalue_entry(l));
    report["oracle_eigenvalues"] = std::move(oracle);
  }

  json checks;
  const LocalizationCheck loc = localization_check(spectrum, op.weight());
  checks["localization"] = {{"pass", loc.sup_bound_pass && loc.cycle_band_pass},
                            {"failures", loc.failures}};

  // Seeded spot checks so reports stay byte-stable.
  {
    std::mt19937_64 rng(12345);
    bool support_pass = true;
    double duality_error = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      const FreeVector v = io_detail::seeded_vector(problem.space, rng);
      const FreeVector image = op.apply(v);
      for (int pt : image.support()) {
        bool covered = false;
        for (const auto& [idx, c] : v.coefficients())
          if (!op.weight().is_zero(idx) && op.map()(idx) == pt) covered = true;
        if (!covered) support_pass = false;
      }
      std::vector<cx> g(space.size());
      std::uniform_real_distribution<double> value(-1.0, 1.0);
      for (auto& x : g) x = cx(value(rng), value(rng));
      g[space.base_index()] = 0.0;
      const cx lhs = dual_pairing(op.adjoint_apply(g), v);
      const cx rhs = dual_pairing(g, image);
      duality_error =
          std::max(duality_error, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    checks["support_preservation"] = {{"pass", support_pass}, {"trials", 8}};
    checks["duality"] = {{"pass", duality_error <= 1e-12},
                         {"max_relative_error", duality_error}};
  }

  if (spectrum.oracle_ran) {
    const OracleComparison cmp = oracle_compare(op);
    json jc;
    jc["pass"] = cmp.match;
    jc["max_pair_distance"] = cmp.max_pair_distance;
    jc["nonzero_count"] = cmp.nonzero_count_oracle;
    if (!cmp.match) {
      jc["failure"] = cmp.failure;
      jc["counterexample"] = problem_to_json(problem);
    }
    checks["oracle_match"] = std::move(jc);
  }
  report["checks"] = std::move(checks);

  const DiscretePredicates dp = discrete_predicates(op);
  report["discrete_predicates"] = {
      {"zero_in_point_spectrum", dp.zero.in_point_spectrum},
      {"reasons", dp.zero.reasons},
      {"surjective", dp.surjective},
      {"surjectivity_constant", dp.surjectivity_constant},
      {"isomorphism", dp.isomorphism}};

  if (options.gelfand_terms > 0) {
    const GelfandReport g = gelfand_sequence(op, options.gelfand_terms);
    json terms = json::array();
    for (const GelfandPoint& t : g.terms)
      terms.push_back({{"n", t.n}, {"bound", t.bound}});
    report["gelfand"] = {{"terms", std::move(terms)},
                         {"spectral_radius", g.spectral_radius}};
  }

  json caveats = json::array();
  caveats.push_back(
      "results describe the finite space exactly; they are not statements "
      "about any infinite completion or limit of the generator family");
  caveats.push_back(
      "on a finite space the cycle description of the nonzero point spectrum "
      "is exact: image compactness is automatic and every contraction scale "
      "below the minimum pairwise distance is vacuously flat");
  if (space.descriptor().kind == MetricKind::Shift ||
      space.descriptor().kind == MetricKind::Geometric)
    caveats.push_back(
        "truncated shift-type operators are nilpotent: their spectra do not "
        "converge to the disc spectrum of the infinite model, and whether the "
        "roots-of-unity description survives unbounded spaces is open");
  if (!spectrum.oracle_ran && options.oracle)
    caveats.push_back("dense oracle skipped: dimension above 512");
  report["caveats"] = std::move(caveats);
  return report;
}

// Human-readable rendering; eigenvalues ordered by modulus descending then
// argument ascending, matching the JSON ordering.
inline std::string render_text_report(const json& report) {
  std::ostringstream out;
  out.precision(12);
  out << "== weighted Lipschitz operator analysis ==\n";
  out << "points: " << report["problem"]["point_count"].get<int>()
      << "  metric: " << report["problem"]["metric_kind"].get<std::string>()
      << "  base: " << report["problem"]["base_id"].get<std::string>() << "\n";
  out << "boundedness: A = " << report["boundedness"]["A"].get<double>()
      << ", B = " << report["boundedness"]["B"].get<double>() << "\n";
  out << "operator norm in [" << report["operator_norm"]["lo"].get<double>()
      << ", " << report["operator_norm"]["hi"].get<double>() << "]\n";
  out << "cycles: " << report["cycles"].size()
      << "  tails: " << report["tails"].size() << "\n";
  out << "nonzero point spectrum (" << report["point_spectrum"]["nonzero"].size()
      << " values):\n";
  for (const auto& e : report["point_spectrum"]["nonzero"])
    out << "  " << e["value"][0].get<double>() << (e["value"][1].get<double>() < 0 ? " - " : " + ")
        << std::abs(e["value"][1].get<double>()) << "i"
        << "  |.| = " << e["modulus"].get<double>()
        << "  arg = " << e["argument"].get<double>() << "\n";
  const auto& zero = report["point_spectrum"]["zero"];
  out << "zero eigenvalue: " << (zero["in_point_spectrum"].get<bool>() ? "yes" : "no");
  if (!zero["reasons"].empty()) {
    out << " (";
    bool first = true;
    for (const auto& r : zero["reasons"]) {
      if (!first) out << "; ";
      out << r.get<std::string>();
      first = false;
    }
    out << ")";
  }
  out << "\n";
  if (report.contains("oracle_eigenvalues"))
    out << "oracle eigenvalues: " << report["oracle_eigenvalues"].size()
        << " computed\n";
  for (const auto& [name, check] : report["checks"].items())
    out << "check " << name << ": "
        << (check["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
  const auto& dp = report["discrete_predicates"];
  out << "surjective: " << (dp["surjective"].get<bool>() ? "yes" : "no")
      << "  isomorphism: " << (dp["isomorphism"].get<bool>() ? "yes" : "no")
      << "  c = " << dp["surjectivity_constant"].get<double>() << "\n";
  if (report.contains("gelfand")) {
    out << "gelfand bounds:";
    for (const auto& t : report["gelfand"]["terms"])
      out << "  n=" << t["n"].get<int>() << ": " << t["bound"].get<double>();
    out << "\n  spectral radius (oracle): "
        << report["gelfand"]["spectral_radius"].get<double>() << "\n";
  }
  for (const auto& c : report["caveats"])
    out << "note: " << c.get<std::string>() << "\n";
  return out.str();
}

}  // namespace lipfree
