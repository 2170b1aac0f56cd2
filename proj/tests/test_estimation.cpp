#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "bilat/estimation.hpp"
#include "bilat/io.hpp"
#include "bilat/optim.hpp"
#include "bilat/rng.hpp"
#include "bilat/simulation.hpp"

using namespace bilat;

namespace {

FrequencyTable load(const char* name) {
  return read_table_file(std::string(BILAT_DATA_DIR) + "/" + name);
}

// Exhaustive profile search: for each theta on the grid, each group's rate
// is optimized independently, so the per-group maxima add up.
double grid_best_loglik(const FrequencyTable& t, double pi_step = 0.01,
                        double th_step = 0.05) {
  double best = -1e300;
  for (double th = th_step; th <= 30.0 + 1e-9; th += th_step) {
    double total = 0.0;
    for (std::size_t i = 0; i < t.num_groups(); ++i) {
      const GroupCounts& g = t.group(i);
      double gbest = -1e300;
      for (double pi = pi_step; pi < 1.0 - 1e-9; pi += pi_step) {
        gbest = std::max(gbest, detail::group_loglik(
                                    static_cast<double>(g.m0),
                                    static_cast<double>(g.m1),
                                    static_cast<double>(g.m2), pi, Theta(th)));
      }
      total += gbest;
    }
    best = std::max(best, total);
  }
  return best;
}

}  // namespace

TEST_CASE("transform anchors and round trip") {
  const ModelParams mp{{Rate(0.5)}, Theta(1.0), Hypothesis::Alternative};
  const std::vector<double> x = transform(mp);
  CHECK(x[0] == doctest::Approx(0.0));
  CHECK(x[1] == doctest::Approx(0.0));

  const ModelParams mp2{{Rate(0.276)}, Theta(1.0), Hypothesis::Alternative};
  CHECK(transform(mp2)[0] ==
        doctest::Approx(std::log(0.276 / 0.724)).epsilon(1e-12));

  RngStream rng(29, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    const double pi = rng.next_uniform(0.001, 0.999);
    const double th = std::exp(rng.next_uniform(std::log(0.01), std::log(100.0)));
    const ModelParams p{{Rate(pi)}, Theta(th), Hypothesis::Alternative};
    const ModelParams back = untransform(transform(p));
    CHECK(back.pis[0].value() == doctest::Approx(pi).epsilon(1e-12));
    CHECK(back.theta.value() == doctest::Approx(th).epsilon(1e-12));
  }
}

TEST_CASE("bfgs minimizes a quadratic and rosenbrock") {
  const Objective quad = [](const std::vector<double>& x,
                            std::vector<double>& g) {
    g[0] = 2.0 * (x[0] - 3.0);
    g[1] = 8.0 * (x[1] + 1.0);
    return (x[0] - 3.0) * (x[0] - 3.0) + 4.0 * (x[1] + 1.0) * (x[1] + 1.0);
  };
  OptimResult r = bfgs_minimize(quad, {0.0, 0.0});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-6));

  const Objective rosen = [](const std::vector<double>& x,
                             std::vector<double>& g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  r = bfgs_minimize(rosen, {-1.2, 1.0});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("bfgs honors the coordinate box") {
  const Objective quad = [](const std::vector<double>& x,
                            std::vector<double>& g) {
    g[0] = 2.0 * (x[0] + 5.0);
    return (x[0] + 5.0) * (x[0] + 5.0);
  };
  BfgsOptions opts;
  opts.lower = {-1.0};
  opts.upper = {10.0};
  const OptimResult r = bfgs_minimize(quad, {2.0}, opts);
  CHECK(r.converged);  // projected gradient vanishes at the bound
  CHECK(r.x[0] == doctest::Approx(-1.0));
}

TEST_CASE("fit reproduces the lens-design analysis") {
  const FrequencyTable t = load("example2.csv");
  const FitPair fits = fit_pair(t);

  CHECK(fits.ha.converged);
  CHECK(std::abs(fits.ha.params_hat.pis[0].value() - 0.276) <= 0.002);
  CHECK(std::abs(fits.ha.params_hat.pis[1].value() - 0.303) <= 0.002);
  CHECK(std::abs(fits.ha.params_hat.theta.value() - 3.051) <= 0.002);
  CHECK(std::abs(fits.h0.params_hat.pis[0].value() - 0.286) <= 0.002);
  CHECK(std::abs(fits.h0.params_hat.theta.value() - 3.050) <= 0.002);
  CHECK(fits.ha.loglik_hat >= fits.h0.loglik_hat);

  // diagnostics contract
  CHECK(fits.ha.grad_norm <= 1e-6);
  CHECK(fits.ha.loglik_hat ==
        doctest::Approx(loglik(fits.ha.params_hat, t)).epsilon(1e-10));
  CHECK(fits.ha.n_starts_used == 5);
  CHECK(fits.h0.n_starts_used == 4);
  CHECK_FALSE(fits.ha.boundary_warning);
}

TEST_CASE("fit reproduces the blindness-survey analysis") {
  const FrequencyTable t = load("example1.csv");
  const FitPair fits = fit_pair(t);
  const std::vector<double> paper_pi = {0.015, 0.030, 0.027, 0.048,
                                        0.067, 0.139, 0.163};
  REQUIRE(fits.ha.params_hat.pis.size() == paper_pi.size());
  for (std::size_t i = 0; i < paper_pi.size(); ++i) {
    CHECK(std::abs(fits.ha.params_hat.pis[i].value() - paper_pi[i]) <= 0.002);
  }
  CHECK(std::abs(fits.ha.params_hat.theta.value() - 4.581) <= 0.01);
  CHECK(std::abs(fits.h0.params_hat.pis[0].value() - 0.044) <= 0.002);
  CHECK(std::abs(fits.h0.params_hat.theta.value() - 9.740) <= 0.01);
}

TEST_CASE("single symmetric group pins the rate at one half") {
  const FrequencyTable t({{"g", 25, 50, 25}});
  const FitResult r = fit(t, Hypothesis::Alternative);
  CHECK(std::abs(r.params_hat.pis[0].value() - 0.5) <= 1e-3);
  // m1/m = 1/2 is the independence ceiling, so theta runs to its floor.
  CHECK(r.boundary_warning);
  CHECK(r.params_hat.theta.value() == doctest::Approx(Theta::min_theta));
  CHECK(r.loglik_hat >= grid_best_loglik(t, 1e-3, 0.05) - 1e-6);
}

TEST_CASE("fit dominates the grid oracle on random small tables") {
  RngStream rng(4242, 0, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t g = 2 + static_cast<std::size_t>(rng.next_u64() % 2);
    std::vector<GroupCounts> rows;
    for (std::size_t i = 0; i < g; ++i) {
      GroupCounts gc;
      gc.label = std::to_string(i);
      while (gc.total() == 0) {
        gc.m0 = static_cast<std::int64_t>(rng.next_u64() % 41);
        gc.m1 = static_cast<std::int64_t>(rng.next_u64() % 41);
        gc.m2 = static_cast<std::int64_t>(rng.next_u64() % 41);
      }
      rows.push_back(gc);
    }
    const FrequencyTable t(std::move(rows));
    const FitResult r = fit(t, Hypothesis::Alternative);
    CHECK(r.loglik_hat >= grid_best_loglik(t) - 1e-6);
  }
}

TEST_CASE("nesting and permutation equivariance") {
  RngStream rng(9, 0, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<GroupCounts> rows;
    for (std::size_t i = 0; i < 3; ++i) {
      rows.push_back({std::to_string(i),
                      1 + static_cast<std::int64_t>(rng.next_u64() % 30),
                      1 + static_cast<std::int64_t>(rng.next_u64() % 30),
                      1 + static_cast<std::int64_t>(rng.next_u64() % 30)});
    }
    const FrequencyTable t(std::move(rows));
    const FitPair fits = fit_pair(t);
    CHECK(fits.ha.loglik_hat >= fits.h0.loglik_hat);

    const std::vector<std::size_t> order = {2, 0, 1};
    const FitResult rp = fit(t.permuted(order), Hypothesis::Alternative);
    CHECK(rp.loglik_hat == doctest::Approx(fits.ha.loglik_hat).epsilon(1e-7));
    CHECK(rp.params_hat.theta.value() ==
          doctest::Approx(fits.ha.params_hat.theta.value()).epsilon(1e-4));
    for (std::size_t k = 0; k < order.size(); ++k) {
      CHECK(rp.params_hat.pis[k].value() ==
            doctest::Approx(fits.ha.params_hat.pis[order[k]].value())
                .epsilon(1e-4));
    }
  }
}

TEST_CASE("consistency on a large synthetic sample") {
  const std::vector<double> pis = {0.3, 0.5, 0.7};
  const Theta theta(3.0);  // tau = 0.6
  RngStream rng(777, 0, 0);
  const FrequencyTable t =
      generate_table(pis, theta, {100000, 100000, 100000}, rng);
  const FitResult r = fit(t, Hypothesis::Alternative);
  for (std::size_t i = 0; i < pis.size(); ++i) {
    CHECK(std::abs(r.params_hat.pis[i].value() - pis[i]) <= 0.01);
  }
  CHECK(std::abs(kendall_tau(r.params_hat.theta) - 0.6) <= 0.02);
}

TEST_CASE("degenerate group yields a boundary warning not a throw") {
  const FrequencyTable t({{"empty", 30, 0, 0}, {"normal", 10, 10, 10}});
  const FitResult r = fit(t, Hypothesis::Alternative);
  CHECK(r.boundary_warning);
  CHECK(r.params_hat.pis[0].value() < 1e-3);
  CHECK(std::isfinite(r.loglik_hat));
}

TEST_CASE("perfect concordance pins theta at its ceiling") {
  const FrequencyTable t({{"a", 20, 0, 10}, {"b", 5, 0, 15}});
  const FitResult r = fit(t, Hypothesis::Alternative);
  CHECK(r.boundary_warning);
  CHECK(r.params_hat.theta.value() == doctest::Approx(Theta::max_theta));
  CHECK(kendall_tau(r.params_hat.theta) > 0.999);
}
