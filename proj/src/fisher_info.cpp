#include "bilat/fisher_info.hpp"

#include <cmath>
#include <string>

namespace bilat {

namespace {

// Entries are 0/0-prone as theta -> 0; evaluation lifts theta to this floor
// and flags the matrix.
constexpr double kThetaFloor = 1e-6;
constexpr double kDenomFloor = 1e-300;

// Pieces shared by the three appendix entry kinds, evaluated in log space so
// theta-th powers of numbers near 1 never overflow.
struct Parts {
  double m;    // group size
  double pi;
  double q;    // 1 - pi
  double s;    // q^theta
  double g;    // 2 - s
  double k1;   // g^(1/theta)
  double k1m1; // k1 - 1, kept exact for large theta
  double w;    // ((2-s)/s)^(1/theta)
  double w2;   // w^2
  double t;    // lomega*g + 2*theta*lq, the common log factor
  double b3;   // bracket shared by the theta-theta and mixed denominators
};

Parts parts_for(double pi, double th, double m) {
  Parts p;
  p.m = m;
  p.pi = pi;
  p.q = 1.0 - pi;
  const double lq = std::log(p.q);
  const double sm1 = std::expm1(th * lq);
  p.s = 1.0 + sm1;
  p.g = 1.0 - sm1;
  const double lg = std::log1p(-sm1);
  const double lomega = lg - th * lq;
  p.k1m1 = std::expm1(lg / th);
  p.k1 = p.k1m1 + 1.0;
  p.w = std::exp(lomega / th);
  p.w2 = p.w * p.w;
  p.t = lomega * p.g + 2.0 * th * lq;
  p.b3 = p.w * (3.0 * pi - 2.0) +
         p.w2 * (2.0 * pi * pi - 3.0 * pi + 1.0) + 1.0;
  return p;
}

double entry_pi_pi(const Parts& p) {
  const double k2 = p.k1 * p.k1;
  const double a = p.m * (4.0 + (8.0 + 2.0 * p.s * p.s) * k2 +
                          (8.0 * p.s - 2.0 * (p.s * p.s * p.q + 6.0)) * p.k1 -
                          8.0 * k2 * p.s);
  const double b = p.k1m1 * p.g * p.g * (p.pi - 1.0) *
                   (p.k1m1 - p.pi * (2.0 * p.k1m1 + 1.0));
  if (std::abs(b) < kDenomFloor) {
    throw SingularInformation("pi-pi information denominator vanished");
  }
  return a / b;
}

double entry_theta_theta(const Parts& p, double th) {
  const double b1 =
      1.0 + p.w * p.q * (2.0 * p.pi - 1.0);  // 3piW - W - 2pi^2 W + 1
  const double c = -p.m * p.t * p.t * b1;
  const double d = th * th * th * th * p.g * p.g * p.b3;
  if (std::abs(d) < kDenomFloor) {
    throw SingularInformation("theta-theta information denominator vanished");
  }
  return c / d;
}

double entry_pi_theta(const Parts& p, double th) {
  const double b2 =
      1.0 - p.w * p.q + p.w * p.s * p.pi * p.q;  // piW - W + piWs - pi^2 Ws + 1
  const double e = -2.0 * p.m * p.t * b2;
  const double f = th * th * p.g * p.g * (p.pi - 1.0) * p.b3;
  if (std::abs(f) < kDenomFloor) {
    throw SingularInformation("pi-theta information denominator vanished");
  }
  return e / f;
}

double effective_theta(const ModelParams& params, bool* clamped) {
  if (params.theta.is_independence()) {
    throw DomainError(
        "information entries need a strictly positive theta; the independence "
        "state has no theta coordinate");
  }
  const double th = params.theta.clamped();
  if (clamped != nullptr) *clamped = th < kThetaFloor;
  return std::max(th, kThetaFloor);
}

}  // namespace

double InfoMatrix::entry(std::size_t i, std::size_t j) const {
  const std::size_t g = diag.size();
  if (i >= dim() || j >= dim()) throw DomainError("InfoMatrix index out of range");
  if (i == g && j == g) return corner;
  if (i == g) return margin[j];
  if (j == g) return margin[i];
  return i == j ? diag[i] : 0.0;
}

std::vector<double> InfoMatrix::dense() const {
  const std::size_t n = dim();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = entry(i, j);
  }
  return out;
}

double info_pi_pi(std::size_t i, const ModelParams& params,
                  const FrequencyTable& table) {
  params.validate_against(table);
  const double th = effective_theta(params, nullptr);
  const Parts p = parts_for(params.rate(i).value(), th,
                            static_cast<double>(table.group_size(i)));
  return entry_pi_pi(p);
}

double info_theta_theta(const ModelParams& params,
                        const FrequencyTable& table) {
  params.validate_against(table);
  const double th = effective_theta(params, nullptr);
  double sum = 0.0;
  for (std::size_t i = 0; i < table.num_groups(); ++i) {
    const Parts p = parts_for(params.rate(i).value(), th,
                              static_cast<double>(table.group_size(i)));
    sum += entry_theta_theta(p, th);
  }
  return sum;
}

double info_pi_theta(std::size_t i, const ModelParams& params,
                     const FrequencyTable& table) {
  params.validate_against(table);
  const double th = effective_theta(params, nullptr);
  const Parts p = parts_for(params.rate(i).value(), th,
                            static_cast<double>(table.group_size(i)));
  return entry_pi_theta(p, th);
}

InfoMatrix assemble_info(const ModelParams& params,
                         const FrequencyTable& table) {
  params.validate_against(table);
  InfoMatrix info;
  const double th = effective_theta(params, &info.theta_clamped);
  const std::size_t g = table.num_groups();
  info.diag.resize(g);
  info.margin.resize(g);
  info.corner = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const Parts p = parts_for(params.rate(i).value(), th,
                              static_cast<double>(table.group_size(i)));
    info.diag[i] = entry_pi_pi(p);
    info.margin[i] = entry_pi_theta(p, th);
    info.corner += entry_theta_theta(p, th);
  }
  return info;
}

std::vector<double> solve_arrowhead(const InfoMatrix& info,
                                    const std::vector<double>& rhs) {
  const std::size_t g = info.diag.size();
  if (rhs.size() != info.dim()) {
    throw DomainError("solve_arrowhead rhs has length " +
                      std::to_string(rhs.size()) + ", expected " +
                      std::to_string(info.dim()));
  }
  double schur = info.corner;
  double reduced_rhs = rhs[g];
  for (std::size_t i = 0; i < g; ++i) {
    if (std::abs(info.diag[i]) < kDenomFloor) {
      throw SingularInformation("vanishing diagonal information entry");
    }
    schur -= info.margin[i] * info.margin[i] / info.diag[i];
    reduced_rhs -= info.margin[i] * rhs[i] / info.diag[i];
  }
  if (std::abs(schur) < 1e-12) {
    throw SingularInformation("arrowhead Schur complement below 1e-12");
  }
  std::vector<double> x(g + 1);
  x[g] = reduced_rhs / schur;
  for (std::size_t i = 0; i < g; ++i) {
    x[i] = (rhs[i] - info.margin[i] * x[g]) / info.diag[i];
  }
  return x;
}

}  // namespace bilat
