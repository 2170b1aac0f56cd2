#include <cmath>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "bilat/fisher_info.hpp"
#include "bilat/rng.hpp"

using namespace bilat;

namespace {

ModelParams params(std::vector<double> pis, double theta) {
  std::vector<Rate> rates;
  for (double p : pis) rates.emplace_back(p);
  return ModelParams{std::move(rates), Theta(theta), Hypothesis::Alternative};
}

FrequencyTable uniform_table(std::size_t g, std::int64_t m) {
  std::vector<GroupCounts> rows;
  for (std::size_t i = 0; i < g; ++i) {
    // Only the group totals enter the expected information.
    rows.push_back({std::to_string(i), m - 2 * (m / 3), m / 3, m / 3});
  }
  return FrequencyTable(std::move(rows));
}

double log_cell(int cell, double pi, double th) {
  const CellProbs p = cell_probs(Rate(pi), Theta(th));
  return std::log(cell == 0 ? p.p0 : cell == 1 ? p.p1 : p.p2);
}

// Expected-Hessian oracle: -sum_cell m p_cell d^2 log p_cell, with central
// second differences of the log cell probabilities.
double oracle_entry(double pi, double th, double m, bool dpi_a, bool dpi_b,
                    double h = 1e-5) {
  const CellProbs p = cell_probs(Rate(pi), Theta(th));
  double total = 0.0;
  for (int cell = 0; cell < 3; ++cell) {
    const double pc = cell == 0 ? p.p0 : cell == 1 ? p.p1 : p.p2;
    double second;
    if (dpi_a == dpi_b) {
      const double hp = dpi_a ? h : h * std::max(1.0, th);
      const double up = log_cell(cell, dpi_a ? pi + hp : pi, dpi_a ? th : th + hp);
      const double mid = log_cell(cell, pi, th);
      const double dn = log_cell(cell, dpi_a ? pi - hp : pi, dpi_a ? th : th - hp);
      second = (up - 2.0 * mid + dn) / (hp * hp);
    } else {
      const double ht = h * std::max(1.0, th);
      const double pp = log_cell(cell, pi + h, th + ht);
      const double pm = log_cell(cell, pi + h, th - ht);
      const double mp = log_cell(cell, pi - h, th + ht);
      const double mm = log_cell(cell, pi - h, th - ht);
      second = (pp - pm - mp + mm) / (4.0 * h * ht);
    }
    total += m * pc * second;
  }
  return -total;
}

}  // namespace

TEST_CASE("diagonal entry matches the expected-Hessian oracle") {
  const FrequencyTable t = uniform_table(1, 100);
  const ModelParams mp = params({0.5}, 2.0);
  const double analytic = info_pi_pi(0, mp, t);
  const double numeric = oracle_entry(0.5, 2.0, 100.0, true, true);
  CHECK(analytic == doctest::Approx(numeric).epsilon(1e-4));
  CHECK(analytic == doctest::Approx(569.298).epsilon(1e-3));
}

TEST_CASE("diagonal entry is linear in the group size") {
  const FrequencyTable t1 = uniform_table(1, 50);
  const FrequencyTable t2 = uniform_table(1, 100);
  const ModelParams mp = params({0.37}, 1.3);
  CHECK(2.0 * info_pi_pi(0, mp, t1) == info_pi_pi(0, mp, t2));
}

TEST_CASE("diagonal entry approaches the independent-pairs limit") {
  const FrequencyTable t = uniform_table(1, 50);
  const ModelParams mp = params({0.4}, 1e-8);  // clamped to the 1e-6 floor
  CHECK(info_pi_pi(0, mp, t) ==
        doctest::Approx(2.0 * 50.0 / (0.4 * 0.6)).epsilon(1e-3));
}

TEST_CASE("theta-theta entry matches the oracle and is additive") {
  const FrequencyTable t1 = uniform_table(1, 100);
  const ModelParams mp1 = params({0.5}, 2.0);
  CHECK(info_theta_theta(mp1, t1) ==
        doctest::Approx(oracle_entry(0.5, 2.0, 100.0, false, false))
            .epsilon(1e-4));

  const FrequencyTable t2 = uniform_table(2, 100);
  const ModelParams mp2 = params({0.5, 0.5}, 2.0);
  CHECK(info_theta_theta(mp2, t2) ==
        doctest::Approx(2.0 * info_theta_theta(mp1, t1)).epsilon(1e-14));

  const FrequencyTable t3({{"a", 40, 30, 30}, {"b", 10, 5, 5}});
  const ModelParams mp3 = params({0.3, 0.6}, 1.5);
  const ModelParams mp3p = params({0.6, 0.3}, 1.5);
  CHECK(info_theta_theta(mp3, t3) ==
        doctest::Approx(info_theta_theta(mp3p, t3.permuted({1, 0})))
            .epsilon(1e-14));
}

TEST_CASE("mixed entry matches the oracle") {
  const FrequencyTable t = uniform_table(1, 100);
  const ModelParams mp = params({0.5}, 2.0);
  CHECK(info_pi_theta(0, mp, t) ==
        doctest::Approx(oracle_entry(0.5, 2.0, 100.0, true, false))
            .epsilon(1e-4));
}

TEST_CASE("mixed entry stays finite toward independence") {
  const FrequencyTable t = uniform_table(1, 50);
  for (double th : {1e-3, 1e-2, 1e-1}) {
    const ModelParams mp = params({0.4}, th);
    const double analytic = info_pi_theta(0, mp, t);
    const double numeric = oracle_entry(0.4, th, 50.0, true, false, 1e-6);
    CHECK(std::isfinite(analytic));
    CHECK(analytic == doctest::Approx(numeric).epsilon(1e-3));
  }
}

TEST_CASE("independence state is rejected for information entries") {
  const FrequencyTable t = uniform_table(1, 10);
  const ModelParams mp{{Rate(0.4)}, Theta::independence(),
                       Hypothesis::Alternative};
  CHECK_THROWS_AS(info_theta_theta(mp, t), DomainError);
}

TEST_CASE("assembled matrix shape and identities") {
  const FrequencyTable t = uniform_table(2, 60);
  const ModelParams mp = params({0.45, 0.45}, 3.0);
  const InfoMatrix info = assemble_info(mp, t);
  CHECK(info.dim() == 3);
  CHECK(info.diag[0] == info.diag[1]);
  CHECK(info.margin[0] == info.margin[1]);
  CHECK(info.entry(0, 1) == 0.0);
  CHECK(info.entry(0, 2) == info.entry(2, 0));

  // determinant > 0 at an interior point with three groups
  const FrequencyTable t3 = uniform_table(3, 100);
  const ModelParams mp3 = params({0.5, 0.5, 0.5}, 2.0);
  const InfoMatrix i3 = assemble_info(mp3, t3);
  const std::vector<double> d = i3.dense();
  Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> m4(d.data());
  CHECK(m4.determinant() > 0.0);

  // inverse times matrix = identity through the arrowhead solve
  for (std::size_t col = 0; col < i3.dim(); ++col) {
    std::vector<double> rhs(i3.dim(), 0.0);
    rhs[col] = 1.0;
    const std::vector<double> x = solve_arrowhead(i3, rhs);
    for (std::size_t row = 0; row < i3.dim(); ++row) {
      double acc = 0.0;
      for (std::size_t k = 0; k < i3.dim(); ++k) acc += i3.entry(row, k) * x[k];
      CHECK(std::abs(acc - (row == col ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("arrowhead solve basics") {
  SUBCASE("diagonal case") {
    InfoMatrix info;
    info.diag = {2.0, 2.0, 2.0};
    info.margin = {0.0, 0.0, 0.0};
    info.corner = 2.0;
    const std::vector<double> x = solve_arrowhead(info, {1, 1, 1, 1});
    for (double v : x) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("random arrowhead against a dense solver") {
    RngStream rng(55, 0, 0);
    for (int rep = 0; rep < 50; ++rep) {
      InfoMatrix info;
      info.diag = {0, 0, 0};
      info.margin = {0, 0, 0};
      for (int i = 0; i < 3; ++i) {
        info.diag[i] = rng.next_uniform(0.5, 5.0);
        info.margin[i] = rng.next_uniform(-1.0, 1.0);
      }
      info.corner = rng.next_uniform(3.0, 8.0);
      std::vector<double> rhs(4);
      for (auto& v : rhs) v = rng.next_uniform(-2.0, 2.0);

      const std::vector<double> x = solve_arrowhead(info, rhs);
      const std::vector<double> d = info.dense();
      Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> a(d.data());
      Eigen::Map<const Eigen::Vector4d> b(rhs.data());
      const Eigen::Vector4d y = a.fullPivLu().solve(b);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(x[i] - y(i)) <= 1e-10);
    }
  }
  SUBCASE("singular arrowhead") {
    InfoMatrix info;
    info.diag = {1.0, 1.0};
    info.margin = {1.0, 1.0};
    info.corner = 2.0;  // Schur complement = 2 - 1 - 1 = 0
    CHECK_THROWS_AS(solve_arrowhead(info, {1, 1, 1}), SingularInformation);
  }
  SUBCASE("rhs length validation") {
    InfoMatrix info;
    info.diag = {1.0};
    info.margin = {0.0};
    info.corner = 1.0;
    CHECK_THROWS_AS(solve_arrowhead(info, {1, 2, 3}), DomainError);
  }
}

TEST_CASE("analytic entries match the oracle over random interior points") {
  RngStream rng(77, 0, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const double pi = rng.next_uniform(0.08, 0.92);
    const double th = std::exp(rng.next_uniform(std::log(0.05), std::log(25.0)));
    const double m = 10.0 + static_cast<double>(rng.next_u64() % 200);
    const FrequencyTable t = uniform_table(1, static_cast<std::int64_t>(m));
    const ModelParams mp = params({pi}, th);

    const double app = info_pi_pi(0, mp, t);
    const double att = info_theta_theta(mp, t);
    const double apt = info_pi_theta(0, mp, t);
    CHECK(std::abs(app - oracle_entry(pi, th, m, true, true)) <=
          1e-3 * std::max(std::abs(app), 1e-6));
    CHECK(std::abs(att - oracle_entry(pi, th, m, false, false)) <=
          1e-3 * std::max(std::abs(att), 1e-6));
    CHECK(std::abs(apt - oracle_entry(pi, th, m, true, false)) <=
          1e-3 * std::max(std::abs(apt), 1e-4));
  }
}

TEST_CASE("assembled information is positive semidefinite") {
  RngStream rng(88, 0, 0);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t g = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    std::vector<double> pis;
    std::vector<GroupCounts> rows;
    for (std::size_t i = 0; i < g; ++i) {
      pis.push_back(rng.next_uniform(0.1, 0.9));
      const std::int64_t m = 10 + static_cast<std::int64_t>(rng.next_u64() % 90);
      rows.push_back({std::to_string(i), m, 0, 0});
    }
    const double th = std::exp(rng.next_uniform(std::log(0.1), std::log(15.0)));
    const InfoMatrix info =
        assemble_info(params(pis, th), FrequencyTable(std::move(rows)));
    const std::vector<double> d = info.dense();
    const auto n = static_cast<Eigen::Index>(info.dim());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = d[i * n + j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("information scales linearly in the counts") {
  const FrequencyTable t({{"a", 20, 8, 4}, {"b", 9, 9, 9}});
  const FrequencyTable t2({{"a", 40, 16, 8}, {"b", 18, 18, 18}});
  const ModelParams mp = params({0.35, 0.6}, 2.7);
  const InfoMatrix a = assemble_info(mp, t);
  const InfoMatrix b = assemble_info(mp, t2);
  for (std::size_t i = 0; i < a.diag.size(); ++i) {
    CHECK(2.0 * a.diag[i] == b.diag[i]);
    CHECK(2.0 * a.margin[i] == b.margin[i]);
  }
  CHECK(2.0 * a.corner == b.corner);
}
