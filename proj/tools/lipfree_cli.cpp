// Command-line front end: validate problem files, run the full spectral
// analysis, scan resolvent grids to CSV and generate the named example
// families.
//
// Exit codes: 0 ok, 1 parse/schema error, 2 invalid metric, 3 inadmissible
// operator (f(0) != 0 and w(0) != 0), 4 internal numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lipfree/problem_io.hpp"
#include "lipfree/shift_model.hpp"

namespace {

using namespace lipfree;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 1;
constexpr int kExitMetric = 2;
constexpr int kExitAdmissibility = 3;
constexpr int kExitNumerical = 4;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw schema_error(std::string("JSON parse error: ") + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int report_metric_violations(const PointedMetricSpace& space,
                             const ValidationReport& report) {
  for (const auto& v : report.violations) {
    std::cerr << "metric violation (" << v.axiom << "): ";
    if (v.axiom == "triangle")
      std::cerr << "d(" << space.report_name(v.i) << "," << space.report_name(v.j)
                << ") > d(" << space.report_name(v.i) << ","
                << space.report_name(v.k) << ") + d(" << space.report_name(v.k)
                << "," << space.report_name(v.j) << ")";
    else
      std::cerr << "points " << space.report_name(v.i) << ", "
                << space.report_name(v.j);
    std::cerr << "\n";
  }
  return kExitMetric;
}

int cmd_validate(const std::string& path) {
  const Problem problem = load_problem(read_json_file(path));
  const ValidationReport report = validate_metric(*problem.space);
  if (!report.valid()) return report_metric_violations(*problem.space, report);
  std::cout << "valid metric space with " << problem.space->size()
            << " points\n";
  return kExitOk;
}

int cmd_analyze(const std::string& path, const std::string& format, int gelfand,
                bool oracle, const std::string& out_path) {
  const Problem problem = load_problem(read_json_file(path));
  const ValidationReport validation = validate_metric(*problem.space);
  if (!validation.valid())
    return report_metric_violations(*problem.space, validation);

  WeightedLipOperator op =
      WeightedLipOperator::build(problem.space, problem.f, problem.w);

  AnalysisOptions options;
  options.oracle = oracle;
  options.gelfand_terms = gelfand;
  const json report = analyze_report(problem, op, options);

  std::string rendered;
  if (format == "json")
    rendered = report.dump(2) + "\n";
  else
    rendered = render_text_report(report);
  if (out_path.empty())
    std::cout << rendered;
  else
    write_text_file(out_path, rendered);
  return kExitOk;
}

int cmd_pseudospectrum(const std::string& path, std::vector<double> grid_args,
                       int resolution, const std::string& out_path) {
  const Problem problem = load_problem(read_json_file(path));
  const ValidationReport validation = validate_metric(*problem.space);
  if (!validation.valid())
    return report_metric_violations(*problem.space, validation);
  WeightedLipOperator op =
      WeightedLipOperator::build(problem.space, problem.f, problem.w);

  GridSpec grid;
  if (!grid_args.empty()) {
    if (grid_args.size() != 4 && grid_args.size() != 5) {
      std::cerr << "--grid needs re0 re1 im0 im1 [res]\n";
      return kExitSchema;
    }
    grid.re0 = grid_args[0];
    grid.re1 = grid_args[1];
    grid.im0 = grid_args[2];
    grid.im1 = grid_args[3];
    if (grid_args.size() == 5) resolution = static_cast<int>(grid_args[4]);
  }
  grid.resolution = resolution;
  if (grid.resolution < 2 || grid.re1 <= grid.re0 || grid.im1 <= grid.im0) {
    std::cerr << "grid is degenerate\n";
    return kExitSchema;
  }

  // Radial metrics are scanned in their weighted-shift coordinates (the
  // coefficient-space conjugate); explicit metrics use the delta basis.
  linalg::Matrix matrix = op.matrix();
  if (problem.space->sum_radial_like()) {
    for (int i = 0; i < matrix.rows(); ++i)
      for (int j = 0; j < matrix.cols(); ++j) {
        if (i == j) continue;
        const double ri = problem.space->radius(op.point_of_basis(i));
        const double rj = problem.space->radius(op.point_of_basis(j));
        matrix(i, j) *= ri / rj;
      }
    std::cerr << "scanning the conjugated (coefficient-space) matrix\n";
  } else {
    std::cerr << "scanning the delta-basis matrix\n";
  }

  const GridScan scan = resolvent_scan(matrix, grid);
  std::ostringstream csv;
  write_grid_csv(csv, scan);
  if (out_path.empty())
    std::cout << csv.str();
  else
    write_text_file(out_path, csv.str());
  for (const double eps : {1e-2, 1e-4, 1e-8})
    std::cerr << "grid points with sigma_min <= " << eps << ": "
              << scan.count_below(eps) << "\n";
  return kExitOk;
}

int cmd_gen(const std::string& family, int n, double lambda_abs,
            const std::string& rho_csv, const std::string& out_path) {
  Problem problem;
  if (family == "shift" || family == "geometric") {
    problem.space = family == "shift"
                        ? PointedMetricSpace::shift(n)
                        : PointedMetricSpace::geometric(lambda_abs, n);
    problem.f.image.resize(n + 1);
    problem.f.image[0] = 0;
    for (int k = 1; k <= n; ++k) problem.f.image[k] = k - 1;
  } else if (family == "sum_radial") {
    std::vector<double> rho;
    std::stringstream ss(rho_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      rho.push_back(std::stod(item));
    }
    if (rho.empty()) throw schema_error("--rho needs a comma-separated list");
    problem.space = PointedMetricSpace::sum_radial(rho);
    problem.f = SelfMap::identity(problem.space->size());
  } else {
    throw schema_error("unknown family: " + family);
  }
  problem.w = Weight::ones(problem.space->size());
  const json out = problem_to_json(problem);
  if (out_path.empty())
    std::cout << out.dump(2) << "\n";
  else
    write_text_file(out_path, out.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral analysis of weighted Lipschitz operators on free spaces"};
  app.require_subcommand(1);

  std::string path, out_path;
  std::string format = "text";
  int gelfand = 0;
  std::string oracle = "on";

  auto* validate = app.add_subcommand("validate", "check a problem file's metric");
  validate->add_option("file", path, "problem file")->required();

  auto* analyze = app.add_subcommand("analyze", "full spectral analysis");
  analyze->add_option("file", path, "problem file")->required();
  analyze->add_option("--report", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--gelfand", gelfand, "number of norm-power terms");
  analyze->add_option("--oracle", oracle, "run the dense eigensolver")
      ->check(CLI::IsMember({"on", "off"}));
  analyze->add_option("--out", out_path, "write the report to a file");

  int gelfand_alias = 8;
  auto* gelfand_cmd = app.add_subcommand("gelfand", "analysis with norm-power bounds");
  gelfand_cmd->add_option("file", path, "problem file")->required();
  gelfand_cmd->add_option("--n-max", gelfand_alias, "number of terms");
  gelfand_cmd->add_option("--report", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  gelfand_cmd->add_option("--out", out_path, "write the report to a file");

  std::vector<double> grid_args;
  int resolution = 81;
  auto* pseudo = app.add_subcommand("pseudospectrum", "resolvent grid to CSV");
  pseudo->add_option("file", path, "problem file")->required();
  pseudo->add_option("--grid", grid_args, "re0 re1 im0 im1 [res]")->expected(4, 5);
  pseudo->add_option("--res", resolution, "grid resolution per axis");
  pseudo->add_option("--out", out_path, "CSV output path");

  std::string family, rho_csv;
  int gen_n = 4;
  double gen_lambda = 1.0;
  auto* gen = app.add_subcommand("gen", "emit an example problem file");
  gen->add_option("family", family, "shift | geometric | sum_radial")->required();
  gen->add_option("--n", gen_n, "number of nonbase points");
  gen->add_option("--lambda", gen_lambda, "|lambda| for the geometric metric");
  gen->add_option("--rho", rho_csv, "comma-separated radii for sum_radial");
  gen->add_option("--out", out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(path);
    if (app.got_subcommand(analyze))
      return cmd_analyze(path, format, gelfand, oracle == "on", out_path);
    if (app.got_subcommand(gelfand_cmd))
      return cmd_analyze(path, format, gelfand_alias, true, out_path);
    if (app.got_subcommand(pseudo))
      return cmd_pseudospectrum(path, grid_args, resolution, out_path);
    if (app.got_subcommand(gen))
      return cmd_gen(family, gen_n, gen_lambda, rho_csv, out_path);
  } catch (const schema_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const admissibility_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  }
  return kExitOk;
}
