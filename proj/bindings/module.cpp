#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "bilat/io.hpp"

namespace py = pybind11;

namespace {

// theta <= 0 on the python side means the independence limit, matching the
// CLI and JSON conventions.
bilat::Theta make_theta(double theta) {
  return theta == 0.0 ? bilat::Theta::independence() : bilat::Theta(theta);
}

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(json_to_py(e));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) {
        out[py::str(it.key())] = json_to_py(it.value());
      }
      return out;
    }
    default:
      return py::none();
  }
}

bilat::Hypothesis parse_hypothesis(const std::string& h) {
  if (h == "h0" || h == "null") return bilat::Hypothesis::Null;
  if (h == "ha" || h == "alternative") return bilat::Hypothesis::Alternative;
  throw bilat::DomainError("hypothesis must be 'h0' or 'ha'");
}

bilat::ModelParams make_params(const std::vector<double>& pis, double theta,
                               const std::string& hypothesis) {
  std::vector<bilat::Rate> rates;
  rates.reserve(pis.size());
  for (double p : pis) rates.emplace_back(p);
  return bilat::ModelParams{std::move(rates), make_theta(theta),
                            parse_hypothesis(hypothesis)};
}

bilat::SimSpec spec_from_kwargs(std::size_t g, std::vector<std::int64_t> m,
                                std::vector<double> pis, double theta, int reps,
                                double alpha, std::uint64_t seed,
                                const std::string& methods, int threads) {
  bilat::SimSpec s;
  s.g = g;
  s.m = std::move(m);
  s.pis = std::move(pis);
  s.theta = make_theta(theta);
  s.reps = reps;
  s.alpha = alpha;
  s.seed = seed;
  s.methods = bilat::parse_methods(methods);
  s.threads = threads;
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clayton-copula model for paired binary data: fitting, "
            "homogeneity tests, and Monte Carlo studies";
  m.attr("__version__") = bilat::kVersion;

  py::register_exception<bilat::Error>(m, "BilatError", PyExc_RuntimeError);

  py::class_<bilat::FrequencyTable>(m, "FrequencyTable")
      .def(py::init([](const std::vector<std::tuple<std::string, std::int64_t,
                                                    std::int64_t, std::int64_t>>&
                           rows) {
             std::vector<bilat::GroupCounts> groups;
             for (const auto& [label, m0, m1, m2] : rows) {
               groups.push_back({label, m0, m1, m2});
             }
             return bilat::FrequencyTable(std::move(groups));
           }),
           py::arg("rows"), "rows: list of (label, m0, m1, m2)")
      .def_property_readonly("num_groups", &bilat::FrequencyTable::num_groups)
      .def_property_readonly("total", &bilat::FrequencyTable::total)
      .def("rows", [](const bilat::FrequencyTable& t) {
        std::vector<std::tuple<std::string, std::int64_t, std::int64_t,
                               std::int64_t>> out;
        for (const auto& g : t.groups()) {
          out.emplace_back(g.label, g.m0, g.m1, g.m2);
        }
        return out;
      })
      .def("to_csv", &bilat::write_table_csv);

  m.def("read_table_csv",
        [](const std::string& path) { return bilat::read_table_file(path); },
        py::arg("path"));

  m.def("clayton_cdf",
        [](double u, double v, double theta) {
          return bilat::clayton_cdf(u, v, make_theta(theta));
        },
        py::arg("u"), py::arg("v"), py::arg("theta"),
        "Clayton copula CDF; theta = 0 is the independence limit");
  m.def("cell_probs",
        [](double pi, double theta) {
          const auto p = bilat::cell_probs(bilat::Rate(pi), make_theta(theta));
          return py::make_tuple(p.p0, p.p1, p.p2);
        },
        py::arg("pi"), py::arg("theta"),
        "(p0, p1, p2) for 0/1/2 affected eyes");
  m.def("kendall_tau",
        [](double theta) { return bilat::kendall_tau(make_theta(theta)); },
        py::arg("theta"));
  m.def("tau_to_theta",
        [](double tau) { return bilat::tau_to_theta(tau).value(); },
        py::arg("tau"));
  m.def("pearson_rho",
        [](double pi, double theta) {
          return bilat::pearson_rho(bilat::Rate(pi), make_theta(theta));
        },
        py::arg("pi"), py::arg("theta"));
  m.def("classical_equivalents",
        [](double pi, double theta) {
          const auto c =
              bilat::classical_equivalents(bilat::Rate(pi), make_theta(theta));
          return py::make_tuple(c.rosner_r, c.donner_rho, c.dallal_gamma);
        },
        py::arg("pi"), py::arg("theta"),
        "(rosner_R, donner_rho, dallal_gamma)");

  m.def("loglik",
        [](const std::vector<double>& pis, double theta,
           const bilat::FrequencyTable& t, const std::string& hypothesis) {
          return bilat::loglik(make_params(pis, theta, hypothesis), t);
        },
        py::arg("pis"), py::arg("theta"), py::arg("table"),
        py::arg("hypothesis") = "ha");
  m.def("chisq_sf", &bilat::chisq_sf, py::arg("x"), py::arg("df"),
        "Upper-tail chi-square probability");

  m.def("fit",
        [](const bilat::FrequencyTable& t, const std::string& hypothesis) {
          const auto fr = bilat::fit(t, parse_hypothesis(hypothesis));
          return json_to_py(bilat::fit_result_json(fr, t));
        },
        py::arg("table"), py::arg("hypothesis") = "ha");

  m.def("lr_test",
        [](const bilat::FrequencyTable& t) {
          return json_to_py(bilat::test_report_json(bilat::lr_test(t), t));
        },
        py::arg("table"));
  m.def("score_test",
        [](const bilat::FrequencyTable& t) {
          return json_to_py(bilat::test_report_json(bilat::score_test(t), t));
        },
        py::arg("table"));
  m.def("wald_test",
        [](const bilat::FrequencyTable& t) {
          return json_to_py(bilat::test_report_json(bilat::wald_test(t), t));
        },
        py::arg("table"));
  m.def("run_tests",
        [](const bilat::FrequencyTable& t, const std::string& methods) {
          py::list out;
          for (const auto& r :
               bilat::run_homogeneity_tests(t, bilat::parse_methods(methods))) {
            out.append(json_to_py(bilat::test_report_json(r, t)));
          }
          return out;
        },
        py::arg("table"), py::arg("methods") = "all");

  m.def("generate_table",
        [](const std::vector<double>& pis, double theta,
           const std::vector<std::int64_t>& sizes, std::uint64_t seed,
           std::uint64_t scenario, std::uint64_t rep) {
          bilat::RngStream rng(seed, scenario, rep);
          return bilat::generate_table(pis, make_theta(theta), sizes, rng);
        },
        py::arg("pis"), py::arg("theta"), py::arg("m"), py::arg("seed"),
        py::arg("scenario") = 0, py::arg("rep") = 0);

  m.def("run_tie",
        [](std::size_t g, std::vector<std::int64_t> size, std::vector<double> pis,
           double theta, int reps, double alpha, std::uint64_t seed,
           const std::string& methods, int threads) {
          const auto spec = spec_from_kwargs(g, std::move(size), std::move(pis),
                                             theta, reps, alpha, seed, methods,
                                             threads);
          return json_to_py(bilat::sim_summary_json(bilat::run_tie(spec)));
        },
        py::arg("g"), py::arg("m"), py::arg("pi"), py::arg("theta"),
        py::arg("reps") = 10000, py::arg("alpha") = 0.05, py::arg("seed") = 0,
        py::arg("methods") = "all", py::arg("threads") = 0);
  m.def("run_power",
        [](std::size_t g, std::vector<std::int64_t> size, std::vector<double> pis,
           double theta, int reps, double alpha, std::uint64_t seed,
           const std::string& methods, int threads) {
          const auto spec = spec_from_kwargs(g, std::move(size), std::move(pis),
                                             theta, reps, alpha, seed, methods,
                                             threads);
          return json_to_py(bilat::sim_summary_json(bilat::run_power(spec)));
        },
        py::arg("g"), py::arg("m"), py::arg("pi"), py::arg("theta"),
        py::arg("reps") = 10000, py::arg("alpha") = 0.05, py::arg("seed") = 0,
        py::arg("methods") = "all", py::arg("threads") = 0);
}
