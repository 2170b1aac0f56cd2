#pragma once

#include <cstdint>
#include <vector>

#include "bilat/hypothesis_tests.hpp"
#include "bilat/rng.hpp"

namespace bilat {

// A Monte Carlo scenario: g groups of sizes m with rates pis and dependence
// theta, tested at level alpha over reps replications.
struct SimSpec {
  std::size_t g = 0;
  std::vector<std::int64_t> m;  // length g (or 1, meaning balanced)
  std::vector<double> pis;      // length g (or 1, shared)
  Theta theta = Theta::independence();
  int reps = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<TestMethod> methods = {TestMethod::LR, TestMethod::Score,
                                     TestMethod::Wald};
  int threads = 0;  // 0 = available parallelism

  std::int64_t group_size(std::size_t i) const {
    return m.size() == 1 ? m[0] : m.at(i);
  }
  double rate(std::size_t i) const {
    return pis.size() == 1 ? pis[0] : pis.at(i);
  }
  void validate() const;
};

// Per-method Monte Carlo outcome. Failed fits are excluded from the
// rejection denominator and surfaced.
struct MethodOutcome {
  TestMethod method;
  std::int64_t rejections = 0;
  std::int64_t failures = 0;
  std::int64_t effective_reps = 0;
  double rejection_fraction = 0.0;
};

struct SimSummary {
  SimSpec spec;
  std::vector<MethodOutcome> outcomes;
  std::int64_t executed_reps = 0;
  bool failure_flag = false;  // >1% of reps failed for some method

  const MethodOutcome& outcome(TestMethod m) const;
};

// Random-sweep study: scenarios are sampled uniformly in (pi, tau) subject
// to every collapsed cell probability exceeding the floor, then each runs a
// Type-I-error study.
struct SweepSpec {
  std::size_t g = 3;
  std::int64_t m = 30;
  int reps = 10000;
  int n_scenarios = 1000;
  double cell_floor = 0.1;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<TestMethod> methods = {TestMethod::LR, TestMethod::Score,
                                     TestMethod::Wald};
  int threads = 0;

  void validate() const;
};

struct SweepRecord {
  int scenario = 0;
  double pi = 0.0;
  double tau = 0.0;
  double theta = 0.0;  // 2 tau / (1 - tau)
  SimSummary summary;
};

// Draws m_i categorical outcomes per group from the cell probabilities and
// tallies them; deterministic given the stream state.
FrequencyTable generate_table(const std::vector<double>& pis,
                              const Theta& theta,
                              const std::vector<std::int64_t>& m,
                              RngStream& rng);

// Empirical Type-I error; requires all rates equal.
SimSummary run_tie(const SimSpec& spec);

// Empirical power; rates may differ.
SimSummary run_power(const SimSpec& spec);

std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

}  // namespace bilat
