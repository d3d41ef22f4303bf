#include "flt/plan_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flt/errors.hpp"

namespace flt {

using nlohmann::json;

namespace {

json merged(const json& defaults, const json& cell) {
  json out = defaults;
  for (auto it = cell.begin(); it != cell.end(); ++it) out[it.key()] = *it;
  return out;
}

SlopeSpec parse_slope(const json& j, const std::string& where,
                      std::string* label, double* param) {
  if (!j.is_object() || !j.contains("family"))
    throw InputError(where + ": slope needs a family");
  const std::string family = j.at("family");
  *label = family;
  if (family == "zero") return SlopeSpec::zero();
  if (family == "theta_kl") {
    if (!j.contains("B") || !j.contains("xi"))
      throw InputError(where + ": theta_kl needs B and xi");
    *param = j.at("xi").get<double>();
    return SlopeSpec::kl(j.at("B").get<double>(), *param);
  }
  if (family == "theta_g") {
    if (!j.contains("B") || !j.contains("tau"))
      throw InputError(where + ": theta_g needs B and tau");
    *param = j.at("tau").get<double>();
    return SlopeSpec::gauss(j.at("B").get<double>(), *param);
  }
  if (family == "custom") {
    if (!j.contains("values"))
      throw InputError(where + ": custom slope needs values");
    const auto vals = j.at("values").get<std::vector<double>>();
    return SlopeSpec::custom(
        Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size()));
  }
  throw InputError(where + ": unknown slope family '" + family + "'");
}

ProcessSpec parse_process(const json& j, int grid_points,
                          const std::string& where) {
  const Grid grid = Grid::uniform(grid_points);
  if (!j.is_object() || !j.contains("kind"))
    throw InputError(where + ": process needs a kind");
  const std::string kind = j.at("kind");
  if (kind == "brownian")
    return ProcessSpec::brownian(grid, j.value("truncation", 100));
  if (kind == "custom") {
    if (!j.contains("lambdas") || !j.contains("basis"))
      throw InputError(where + ": custom process needs lambdas and basis");
    const auto lambdas = j.at("lambdas").get<std::vector<double>>();
    const auto rows = j.at("basis").get<std::vector<std::vector<double>>>();
    if (rows.size() != lambdas.size())
      throw InputError(where + ": lambdas/basis size mismatch");
    Eigen::MatrixXd basis(rows.size(), grid_points);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != grid_points)
        throw InputError(where + ": basis row " + std::to_string(r + 1) +
                         " does not match grid_points");
      basis.row(r) =
          Eigen::Map<const Eigen::VectorXd>(rows[r].data(), grid_points);
    }
    return ProcessSpec::custom(
        grid, Eigen::Map<const Eigen::VectorXd>(lambdas.data(), lambdas.size()),
        std::move(basis));
  }
  throw InputError(where + ": unknown process kind '" + kind + "'");
}

}  // namespace

SimulationPlan read_plan_file(const std::string& path, int trials_override,
                              std::uint64_t seed_override,
                              bool has_seed_override) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }

  SimulationPlan plan;
  plan.schema_version = root.value("schema_version", 0);
  if (plan.schema_version != 1)
    throw InputError(path + ": unsupported schema_version");
  if (!root.contains("cells") || !root.at("cells").is_array() ||
      root.at("cells").empty())
    throw InputError(path + ": no cells");

  const json defaults = root.value("defaults", json::object());
  std::vector<std::string> problems;
  int index = 0;
  for (const auto& raw : root.at("cells")) {
    ++index;
    const std::string fallback_name = "cell" + std::to_string(index);
    try {
      const json c = merged(defaults, raw);
      PlanCell cell;
      cell.name = c.value("name", fallback_name);
      const std::string where = path + ": cell '" + cell.name + "'";

      cell.grid_points = c.value("grid_points", 1000);
      if (cell.grid_points < 2) throw InputError(where + ": grid_points < 2");

      ExperimentPlan& p = cell.plan;
      p.n = c.value("n", 0);
      if (p.n < 4) throw InputError(where + ": need n >= 4");
      p.alpha = c.value("alpha", 0.05);
      if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw InputError(where + ": alpha outside (0,1)");
      p.noise_sd = c.value("noise_sd", 1.0);
      if (!(p.noise_sd > 0.0)) throw InputError(where + ": noise_sd <= 0");
      p.trials = trials_override > 0 ? trials_override : c.value("trials", 1000);
      if (p.trials < 1) throw InputError(where + ": trials < 1");
      p.mc_replicates = c.value("mc_replicates", 1000);
      p.seed = has_seed_override ? seed_override
                                 : c.value("seed", std::uint64_t{0});
      p.kbar_override = c.value("kbar", 0);

      p.run_p1 = false;
      p.run_p2 = false;
      const auto methods =
          c.value("methods", std::vector<std::string>{"p1", "p2"});
      for (const auto& m : methods) {
        if (m == "p1")
          p.run_p1 = true;
        else if (m == "p2")
          p.run_p2 = true;
        else
          throw InputError(where + ": unknown method '" + m + "'");
      }
      if (!p.run_p1 && !p.run_p2) throw InputError(where + ": no methods");
      if (p.run_p2 && p.mc_replicates < 100)
        throw InputError(where + ": mc_replicates < 100");

      p.process = parse_process(
          c.value("process", json{{"kind", "brownian"}}), cell.grid_points,
          where);
      cell.slope_label = "zero";
      cell.slope_param = 0.0;
      p.slope =
          parse_slope(c.value("slope", json{{"family", "zero"}}), where,
                      &cell.slope_label, &cell.slope_param);
      // materialize once so bad parameters surface during validation
      (void)slope_on_grid(p.slope, p.process);
      (void)dimension_collection(p.n, p.kbar_override);

      plan.cells.push_back(std::move(cell));
    } catch (const std::exception& e) {
      problems.emplace_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid plan entries:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
  return plan;
}

std::string results_csv_header() {
  return "cell,method,n,slope_family,slope_param,slope_norm,trials,rejections,"
         "percent,ci_half_width,alpha,mc_replicates,grid_points,seed,"
         "elapsed_seconds";
}

std::string format_result_row(const ResultRow& row) {
  std::ostringstream os;
  os.precision(10);
  os << row.cell << ',' << row.method << ',' << row.n << ',' << row.slope_label
     << ',' << row.slope_param << ',' << row.slope_norm << ',' << row.trials
     << ',' << row.rejections << ',' << row.percent << ',' << row.ci_half_width
     << ',' << row.alpha << ',' << row.mc_replicates << ',' << row.grid_points
     << ',' << row.seed << ',' << row.elapsed_seconds;
  return os.str();
}

std::vector<std::pair<std::string, std::string>> read_existing_results(
    const std::string& path, std::vector<std::string>* verbatim_rows) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::ifstream in(path);
  if (!in) return keys;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line != results_csv_header())
        throw InputError(path + ": existing output has a different header; "
                         "refusing to resume into it");
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw InputError(path + ": malformed existing results row");
    keys.emplace_back(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1));
    if (verbatim_rows) verbatim_rows->push_back(line);
  }
  return keys;
}

std::string format_test_report(const AdaptiveTestResult& result, int rank,
                               int kbar, const std::string& config_json) {
  json per_k = json::array();
  for (const auto& d : result.per_k) {
    per_k.push_back({{"k", d.k},
                     {"k_effective", d.k_effective},
                     {"statistic", d.statistic},
                     {"threshold", d.threshold},
                     {"margin", d.margin},
                     {"p_value", d.p_value},
                     {"degenerate", d.degenerate}});
  }
  json weight{{"method", result.weight.method == CalibrationMethod::P1
                             ? "p1"
                             : "p2"},
              {"alpha", result.weight.alpha},
              {"weight", result.weight.weight}};
  if (result.weight.method == CalibrationMethod::P2) {
    weight["mc_replicates"] = result.weight.mc_replicates;
    weight["mc_seed"] = result.weight.mc_stream.seed;
    weight["mc_stream_id"] = result.weight.mc_stream.stream_id;
  }
  json report{{"schema_version", 1},
              {"config", json::parse(config_json)},
              {"rank", rank},
              {"kbar", kbar},
              {"weight", weight},
              {"per_k", per_k},
              {"supremum_margin", result.supremum_margin},
              {"selected_k", result.selected_k},
              {"reject", result.reject}};
  return report.dump(2) + "\n";
}

}  // namespace flt
