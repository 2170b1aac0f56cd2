#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bilat/io.hpp"

namespace {

using nlohmann::json;

// Flag values that name things (methods, table ids) are usage errors when
// wrong; anything that fails while computing is a runtime error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw bilat::Error("cannot write '" + out_path + "'");
  out << text;
}

std::vector<bilat::TestMethod> methods_or_usage(const std::string& flag) {
  try {
    return bilat::parse_methods(flag);
  } catch (const bilat::DomainError& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
  return out;
}

bilat::Theta theta_from_flag(double v) {
  return v == 0.0 ? bilat::Theta::independence() : bilat::Theta(v);
}

int cmd_fit(const std::string& data_path, const std::string& hypothesis,
            const std::string& out_path) {
  if (hypothesis != "both" && hypothesis != "h0" && hypothesis != "ha") {
    throw UsageError("--hypothesis must be both, h0, or ha");
  }
  const bilat::FrequencyTable table = bilat::read_table_file(data_path);
  json j;
  j["input"] = {{"path", data_path}, {"digest", bilat::file_digest(data_path)}};
  j["tool_version"] = bilat::kVersion;
  if (hypothesis == "both") {
    const bilat::FitPair fits = bilat::fit_pair(table);
    j["ha"] = bilat::fit_result_json(fits.ha, table);
    j["h0"] = bilat::fit_result_json(fits.h0, table);
  } else if (hypothesis == "ha") {
    j["ha"] = bilat::fit_result_json(
        bilat::fit(table, bilat::Hypothesis::Alternative), table);
  } else {
    j["h0"] = bilat::fit_result_json(bilat::fit(table, bilat::Hypothesis::Null),
                                     table);
  }
  write_output(j.dump(2) + "\n", out_path);
  return 0;
}

int cmd_test(const std::string& data_path, const std::string& method_flag,
             const std::string& out_path) {
  const auto methods = methods_or_usage(method_flag);
  const bilat::FrequencyTable table = bilat::read_table_file(data_path);
  const auto reports = bilat::run_homogeneity_tests(table, methods);
  json j;
  j["input"] = {{"path", data_path}, {"digest", bilat::file_digest(data_path)}};
  j["tool_version"] = bilat::kVersion;
  json tests = json::array();
  for (const auto& r : reports) tests.push_back(bilat::test_report_json(r, table));
  j["tests"] = tests;
  write_output(j.dump(2) + "\n", out_path);
  return 0;
}

struct SimulateFlags {
  std::string config;
  std::size_t g = 0;
  std::string m;
  std::string pi;
  double theta = -1.0;
  int reps = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string methods = "all";
  int scenarios = 1000;
  double floor = 0.1;
};

bilat::SimSpec sim_spec_from_flags(const SimulateFlags& f) {
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw bilat::Error("cannot open '" + f.config + "'");
    return bilat::sim_spec_from_json(json::parse(in));
  }
  if (f.g == 0 || f.m.empty() || f.pi.empty() || f.theta < 0.0) {
    throw UsageError("simulate needs --config or all of --g --m --pi --theta");
  }
  bilat::SimSpec s;
  s.g = f.g;
  s.m = parse_int_list(f.m);
  s.pis = parse_double_list(f.pi);
  s.theta = theta_from_flag(f.theta);
  s.reps = f.reps;
  s.alpha = f.alpha;
  s.seed = f.seed;
  s.threads = f.threads;
  s.methods = methods_or_usage(f.methods);
  s.validate();
  return s;
}

bilat::SweepSpec sweep_spec_from_flags(const SimulateFlags& f) {
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw bilat::Error("cannot open '" + f.config + "'");
    return bilat::sweep_spec_from_json(json::parse(in));
  }
  bilat::SweepSpec s;
  if (f.g != 0) s.g = f.g;
  if (!f.m.empty()) {
    const auto ms = parse_int_list(f.m);
    if (ms.size() != 1) throw UsageError("sweep takes a single --m");
    s.m = ms[0];
  }
  s.reps = f.reps;
  s.n_scenarios = f.scenarios;
  s.cell_floor = f.floor;
  s.alpha = f.alpha;
  s.seed = f.seed;
  s.threads = f.threads;
  s.methods = methods_or_usage(f.methods);
  s.validate();
  return s;
}

int cmd_simulate(const std::string& mode, const SimulateFlags& f,
                 const std::string& out_path) {
  std::ostringstream lines;
  if (mode == "tie" || mode == "power") {
    const bilat::SimSpec spec = sim_spec_from_flags(f);
    const bilat::SimSummary s =
        mode == "tie" ? bilat::run_tie(spec) : bilat::run_power(spec);
    lines << bilat::sim_summary_json(s).dump() << "\n";
  } else if (mode == "sweep") {
    const bilat::SweepSpec spec = sweep_spec_from_flags(f);
    for (const auto& rec : bilat::run_sweep(spec)) {
      lines << bilat::sweep_record_json(rec).dump() << "\n";
    }
  } else {
    throw UsageError("simulate mode must be tie, power, or sweep");
  }
  write_output(lines.str(), out_path);
  return 0;
}

struct TableGrid {
  std::size_t g;
  bool power;
  // tie: the shared rate; power: the case label and rate vector
  std::vector<std::pair<std::string, std::vector<double>>> rows;
};

TableGrid named_grid(const std::string& which) {
  if (which == "tie3" || which == "tie6") {
    TableGrid grid;
    grid.g = which == "tie3" ? 3 : 6;
    grid.power = false;
    for (double pi : {0.4, 0.5, 0.6, 0.7}) {
      grid.rows.push_back({std::to_string(pi).substr(0, 3), {pi}});
    }
    return grid;
  }
  if (which == "power3") {
    return {3,
            true,
            {{"1", {0.4, 0.4, 0.5}},
             {"2", {0.4, 0.4, 0.53}},
             {"3", {0.5, 0.5, 0.67}},
             {"4", {0.6, 0.6, 0.8}}}};
  }
  if (which == "power6") {
    return {6,
            true,
            {{"A", {0.4, 0.4, 0.45, 0.45, 0.5, 0.5}},
             {"B", {0.4, 0.4, 0.45, 0.45, 0.53, 0.53}},
             {"C", {0.5, 0.5, 0.6, 0.6, 0.67, 0.67}},
             {"D", {0.6, 0.6, 0.7, 0.7, 0.8, 0.8}}}};
  }
  throw UsageError("tables id must be tie3, tie6, power3, or power6");
}

std::string fmt(double v, int prec) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(prec) << v;
  return out.str();
}

int cmd_tables(const std::string& which, const std::string& m_flag, int reps,
               std::uint64_t seed, int threads, const std::string& out_path) {
  const TableGrid grid = named_grid(which);
  std::vector<std::int64_t> sizes;
  if (m_flag == "all") {
    sizes = {30, 55, 100};
  } else if (m_flag == "30" || m_flag == "55" || m_flag == "100") {
    sizes = {std::stoll(m_flag)};
  } else {
    throw UsageError("--m must be 30, 55, 100, or all");
  }

  std::ostringstream csv;
  csv << (grid.power ? "theta,case,max_diff" : "theta,pi,rho");
  if (sizes.size() == 1) {
    csv << ",lr,score,wald\n";
  } else {
    for (auto m : sizes) {
      csv << ",lr_m" << m << ",score_m" << m << ",wald_m" << m;
    }
    csv << "\n";
  }

  for (double theta_val : {0.0, 2.0, 8.0}) {
    const bilat::Theta theta = theta_from_flag(theta_val);
    for (const auto& [label, pis] : grid.rows) {
      csv << fmt(theta_val, 0) << ',' << label << ',';
      if (grid.power) {
        double maxdiff = 0.0;
        for (double a : pis) {
          for (double b : pis) maxdiff = std::max(maxdiff, std::abs(a - b));
        }
        csv << fmt(maxdiff, 2);
      } else {
        csv << fmt(theta.is_independence()
                       ? 0.0
                       : bilat::pearson_rho(bilat::Rate(pis[0]), theta),
                   3);
      }
      for (auto m : sizes) {
        bilat::SimSpec spec;
        spec.g = grid.g;
        spec.m = {m};
        spec.pis = pis;
        spec.theta = theta;
        spec.reps = reps;
        spec.seed = seed;
        spec.threads = threads;
        const bilat::SimSummary s =
            grid.power ? bilat::run_power(spec) : bilat::run_tie(spec);
        for (bilat::TestMethod tm :
             {bilat::TestMethod::LR, bilat::TestMethod::Score,
              bilat::TestMethod::Wald}) {
          csv << ',' << fmt(100.0 * s.outcome(tm).rejection_fraction, 3);
        }
      }
      csv << '\n';
    }
  }
  write_output(csv.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clayton-copula homogeneity analysis for bilateral data"};
  app.set_version_flag("--version", bilat::kVersion);
  app.require_subcommand(1);

  std::string data_path, out_path, hypothesis = "both", method = "all";

  auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit");
  fit_cmd->add_option("data", data_path, "table CSV")->required();
  fit_cmd->add_option("--hypothesis", hypothesis, "both | h0 | ha");
  fit_cmd->add_option("-o,--output", out_path, "write JSON here");

  auto* test_cmd = app.add_subcommand("test", "Homogeneity tests");
  test_cmd->add_option("data", data_path, "table CSV")->required();
  test_cmd->add_option("--method", method, "lr | score | wald | all");
  test_cmd->add_option("-o,--output", out_path, "write JSON here");

  SimulateFlags sf;
  std::string sim_mode;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo studies");
  sim_cmd->add_option("mode", sim_mode, "tie | power | sweep")->required();
  sim_cmd->add_option("--config", sf.config, "SimSpec/SweepSpec JSON file");
  sim_cmd->add_option("--g", sf.g, "number of groups");
  sim_cmd->add_option("--m", sf.m, "group size(s), comma separated");
  sim_cmd->add_option("--pi", sf.pi, "rate(s), comma separated");
  sim_cmd->add_option("--theta", sf.theta, "Clayton parameter; 0 = independence");
  sim_cmd->add_option("--reps", sf.reps, "replications");
  sim_cmd->add_option("--alpha", sf.alpha, "nominal level");
  sim_cmd->add_option("--seed", sf.seed, "RNG seed");
  sim_cmd->add_option("--threads", sf.threads, "worker threads (0 = auto)");
  sim_cmd->add_option("--methods", sf.methods, "lr,score,wald or all");
  sim_cmd->add_option("--scenarios", sf.scenarios, "sweep: scenario count");
  sim_cmd->add_option("--floor", sf.floor, "sweep: cell probability floor");
  sim_cmd->add_option("-o,--output", out_path, "write JSON lines here");

  std::string which, tables_m = "30";
  int reps = 10000, threads = 0;
  std::uint64_t seed = 0;
  auto* tab_cmd = app.add_subcommand("tables", "Reproduce a results table");
  tab_cmd->add_option("which", which, "tie3 | tie6 | power3 | power6")
      ->required();
  tab_cmd->add_option("--m", tables_m, "30 | 55 | 100 | all");
  tab_cmd->add_option("--reps", reps, "replications per cell");
  tab_cmd->add_option("--seed", seed, "RNG seed");
  tab_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  tab_cmd->add_option("-o,--output", out_path, "write CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(data_path, hypothesis, out_path);
    if (test_cmd->parsed()) return cmd_test(data_path, method, out_path);
    if (sim_cmd->parsed()) return cmd_simulate(sim_mode, sf, out_path);
    if (tab_cmd->parsed())
      return cmd_tables(which, tables_m, reps, seed, threads, out_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
