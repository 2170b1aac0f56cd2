#include "bilat/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bilat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::int64_t parse_count(const std::string& s, const std::string& name,
                         int lineno, const char* column) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(name + ":" + std::to_string(lineno) + ": column '" +
                     column + "' is not an integer count: '" + s + "'");
  }
  return v;
}

}  // namespace

FrequencyTable read_table_csv(std::istream& in, const std::string& name) {
  std::vector<GroupCounts> groups;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::vector<std::string> fields = split_csv(t);
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "group" || fields[1] != "m0" ||
          fields[2] != "m1" || fields[3] != "m2") {
        throw ParseError(name + ":" + std::to_string(lineno) +
                         ": expected header 'group,m0,m1,m2'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": expected " +
                       "4 fields (group,m0,m1,m2), got " +
                       std::to_string(fields.size()));
    }
    GroupCounts g;
    g.label = fields[0];
    g.m0 = parse_count(fields[1], name, lineno, "m0");
    g.m1 = parse_count(fields[2], name, lineno, "m1");
    g.m2 = parse_count(fields[3], name, lineno, "m2");
    groups.push_back(std::move(g));
  }
  if (!header_seen) throw ParseError(name + ": empty table file");
  try {
    return FrequencyTable(std::move(groups));
  } catch (const DomainError& e) {
    throw ParseError(name + ": " + e.what());
  }
}

FrequencyTable read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_table_csv(in, path);
}

std::string write_table_csv(const FrequencyTable& table) {
  std::ostringstream out;
  out << "group,m0,m1,m2\n";
  for (const auto& g : table.groups()) {
    out << g.label << ',' << g.m0 << ',' << g.m1 << ',' << g.m2 << '\n';
  }
  return out.str();
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << h;
  return out.str();
}

nlohmann::json fit_result_json(const FitResult& fr,
                               const FrequencyTable& table) {
  nlohmann::json j;
  j["hypothesis"] = fr.params_hat.hypothesis == Hypothesis::Null ? "h0" : "ha";
  nlohmann::json pis = nlohmann::json::array();
  nlohmann::json rhos = nlohmann::json::array();
  for (std::size_t i = 0; i < table.num_groups(); ++i) {
    const Rate& r = fr.params_hat.rate(i);
    pis.push_back(r.value());
    rhos.push_back(pearson_rho(r, fr.params_hat.theta));
  }
  if (fr.params_hat.hypothesis == Hypothesis::Null) {
    j["pi0"] = fr.params_hat.pis.front().value();
    j["rho0"] = pearson_rho(fr.params_hat.pis.front(), fr.params_hat.theta);
  }
  j["pi"] = pis;
  j["rho"] = rhos;
  j["theta"] = fr.params_hat.theta.value();
  j["kendall_tau"] = kendall_tau(fr.params_hat.theta);
  j["loglik"] = fr.loglik_hat;
  j["converged"] = fr.converged;
  j["grad_norm"] = fr.grad_norm;
  j["iterations"] = fr.iterations;
  j["n_starts_used"] = fr.n_starts_used;
  j["boundary_warning"] = fr.boundary_warning;
  return j;
}

nlohmann::json test_report_json(const TestReport& tr,
                                const FrequencyTable& table) {
  nlohmann::json j;
  j["method"] = method_name(tr.method);
  j["statistic"] = tr.statistic;
  j["df"] = tr.df;
  j["p_value"] = tr.p_value;
  if (tr.fit_h0) j["fit_h0"] = fit_result_json(*tr.fit_h0, table);
  if (tr.fit_ha) j["fit_ha"] = fit_result_json(*tr.fit_ha, table);
  return j;
}

namespace {

nlohmann::json theta_json(const Theta& t) {
  if (t.is_independence()) return 0.0;
  return t.value();
}

nlohmann::json methods_json(const std::vector<TestMethod>& ms) {
  nlohmann::json a = nlohmann::json::array();
  for (TestMethod m : ms) a.push_back(method_name(m));
  return a;
}

}  // namespace

nlohmann::json sim_summary_json(const SimSummary& s) {
  nlohmann::json j;
  j["spec"] = {{"g", s.spec.g},
               {"m", s.spec.m},
               {"pi", s.spec.pis},
               {"theta", theta_json(s.spec.theta)},
               {"reps", s.spec.reps},
               {"alpha", s.spec.alpha},
               {"seed", s.spec.seed},
               {"methods", methods_json(s.spec.methods)}};
  j["executed_reps"] = s.executed_reps;
  j["failure_flag"] = s.failure_flag;
  nlohmann::json res = nlohmann::json::object();
  for (const auto& mo : s.outcomes) {
    res[method_name(mo.method)] = {
        {"rejections", mo.rejections},
        {"failures", mo.failures},
        {"effective_reps", mo.effective_reps},
        {"rejection_fraction", mo.rejection_fraction}};
  }
  j["results"] = res;
  return j;
}

nlohmann::json sweep_record_json(const SweepRecord& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["pi"] = r.pi;
  j["tau"] = r.tau;
  j["theta"] = r.theta;
  j["summary"] = sim_summary_json(r.summary);
  return j;
}

namespace {

Theta theta_from_json(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "independence") return Theta::independence();
    throw DomainError("theta: expected a number or \"independence\"");
  }
  const double t = v.get<double>();
  if (t == 0.0) return Theta::independence();
  return Theta(t);
}

template <typename T>
std::vector<T> list_or_scalar(const nlohmann::json& v) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<T>());
  } else {
    out.push_back(v.get<T>());
  }
  return out;
}

}  // namespace

SimSpec sim_spec_from_json(const nlohmann::json& j) {
  SimSpec s;
  try {
    s.g = j.at("g").get<std::size_t>();
    s.m = list_or_scalar<std::int64_t>(j.at("m"));
    s.pis = list_or_scalar<double>(j.at("pi"));
    s.theta = theta_from_json(j.at("theta"));
    if (j.contains("reps")) s.reps = j.at("reps").get<int>();
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("methods")) {
      s.methods.clear();
      for (const auto& m : j.at("methods")) {
        const auto parsed = parse_methods(m.get<std::string>());
        s.methods.insert(s.methods.end(), parsed.begin(), parsed.end());
      }
    }
    if (j.contains("threads")) s.threads = j.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("SimSpec: ") + e.what());
  }
  s.validate();
  return s;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  SweepSpec s;
  try {
    if (j.contains("g")) s.g = j.at("g").get<std::size_t>();
    if (j.contains("m")) s.m = j.at("m").get<std::int64_t>();
    if (j.contains("reps")) s.reps = j.at("reps").get<int>();
    if (j.contains("scenarios")) s.n_scenarios = j.at("scenarios").get<int>();
    if (j.contains("floor")) s.cell_floor = j.at("floor").get<double>();
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) s.threads = j.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("SweepSpec: ") + e.what());
  }
  s.validate();
  return s;
}

std::vector<TestMethod> parse_methods(const std::string& flag) {
  if (flag == "all") {
    return {TestMethod::LR, TestMethod::Score, TestMethod::Wald};
  }
  std::vector<TestMethod> out;
  std::stringstream ss(flag);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const std::string t = trim(tok);
    if (t == "lr") {
      out.push_back(TestMethod::LR);
    } else if (t == "score") {
      out.push_back(TestMethod::Score);
    } else if (t == "wald") {
      out.push_back(TestMethod::Wald);
    } else {
      throw DomainError("unknown test method '" + t +
                        "' (expected lr, score, wald, or all)");
    }
  }
  if (out.empty()) throw DomainError("no test method given");
  return out;
}

}  // namespace bilat
