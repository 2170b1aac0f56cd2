#pragma once

#include <vector>

#include "bilat/likelihood.hpp"

namespace bilat {

// Expected Fisher information of the (pi_1..pi_g, theta) parameterization.
// The matrix is an arrowhead: diagonal in the rate block, dense only in the
// last row/column.
struct InfoMatrix {
  std::vector<double> diag;    // I_ii for i = 1..g
  std::vector<double> margin;  // I_i(g+1) = I_(g+1)i
  double corner = 0.0;         // I_(g+1)(g+1)
  bool theta_clamped = false;  // theta was lifted to the evaluation floor

  std::size_t dim() const { return diag.size() + 1; }
  double entry(std::size_t i, std::size_t j) const;

  // Row-major dense copy (dim x dim), for oracles and eigenchecks.
  std::vector<double> dense() const;
};

// Diagonal entry A_i/B_i.
double info_pi_pi(std::size_t i, const ModelParams& params,
                  const FrequencyTable& table);

// Corner entry sum_i C_i/D_i (additive over independent groups).
double info_theta_theta(const ModelParams& params, const FrequencyTable& table);

// Margin entry E_i/F_i.
double info_pi_theta(std::size_t i, const ModelParams& params,
                     const FrequencyTable& table);

InfoMatrix assemble_info(const ModelParams& params, const FrequencyTable& table);

// Solves info * x = rhs through the Schur complement on the theta entry,
// O(g). Throws SingularInformation when the complement magnitude < 1e-12.
std::vector<double> solve_arrowhead(const InfoMatrix& info,
                                    const std::vector<double>& rhs);

}  // namespace bilat
