#include "bilat/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace bilat {

namespace {

int worker_count(int requested, int reps) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return std::min(n, std::max(reps, 1));
}

struct RepCounts {
  std::vector<std::int64_t> rejections;
  std::vector<std::int64_t> failures;

  explicit RepCounts(std::size_t k) : rejections(k, 0), failures(k, 0) {}

  void merge(const RepCounts& other) {
    for (std::size_t i = 0; i < rejections.size(); ++i) {
      rejections[i] += other.rejections[i];
      failures[i] += other.failures[i];
    }
  }
};

// One replication: generate, fit, test. Counts are indexed like
// spec.methods.
void run_rep(const SimSpec& spec, std::uint64_t scenario, int rep,
             RepCounts& counts) {
  RngStream rng(spec.seed, scenario, static_cast<std::uint64_t>(rep));
  std::vector<double> pis(spec.g);
  std::vector<std::int64_t> m(spec.g);
  for (std::size_t i = 0; i < spec.g; ++i) {
    pis[i] = spec.rate(i);
    m[i] = spec.group_size(i);
  }
  const FrequencyTable table = generate_table(pis, spec.theta, m, rng);
  std::vector<TestReport> reports;
  try {
    reports = run_homogeneity_tests(table, spec.methods);
  } catch (const Error&) {
    // A shared fit failed. The score test depends only on the null fit, so
    // give it its own attempt; the others lose this replication.
    for (std::size_t k = 0; k < spec.methods.size(); ++k) {
      if (spec.methods[k] == TestMethod::Score) {
        try {
          const TestReport r = score_test(table);
          if (r.p_value < spec.alpha) ++counts.rejections[k];
          continue;
        } catch (const Error&) {
        }
      }
      ++counts.failures[k];
    }
    return;
  }
  for (std::size_t k = 0; k < spec.methods.size(); ++k) {
    if (reports[k].p_value < spec.alpha) ++counts.rejections[k];
  }
}

SimSummary run_study(const SimSpec& spec, std::uint64_t scenario) {
  spec.validate();
  const std::size_t nm = spec.methods.size();
  const int workers = worker_count(spec.threads, spec.reps);

  std::vector<RepCounts> partial(workers, RepCounts(nm));
  if (workers == 1) {
    for (int r = 0; r < spec.reps; ++r) run_rep(spec, scenario, r, partial[0]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = next.fetch_add(1); r < spec.reps; r = next.fetch_add(1)) {
          run_rep(spec, scenario, r, partial[w]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  RepCounts total(nm);
  for (const auto& p : partial) total.merge(p);

  SimSummary out;
  out.spec = spec;
  out.executed_reps = spec.reps;
  for (std::size_t k = 0; k < nm; ++k) {
    MethodOutcome mo;
    mo.method = spec.methods[k];
    mo.rejections = total.rejections[k];
    mo.failures = total.failures[k];
    mo.effective_reps = spec.reps - total.failures[k];
    mo.rejection_fraction =
        mo.effective_reps > 0
            ? static_cast<double>(mo.rejections) /
                  static_cast<double>(mo.effective_reps)
            : 0.0;
    if (mo.failures * 100 > spec.reps) out.failure_flag = true;
    out.outcomes.push_back(mo);
  }
  return out;
}

}  // namespace

void SimSpec::validate() const {
  if (g < 2) throw DomainError("SimSpec needs g >= 2");
  if (m.size() != 1 && m.size() != g) {
    throw DomainError("SimSpec m must have length 1 or g");
  }
  if (pis.size() != 1 && pis.size() != g) {
    throw DomainError("SimSpec pis must have length 1 or g");
  }
  for (std::size_t i = 0; i < g; ++i) {
    if (group_size(i) < 1) throw DomainError("SimSpec group sizes must be >= 1");
    const double p = rate(i);
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("SimSpec rates must lie in (0, 1)");
    }
  }
  if (reps < 1) throw DomainError("SimSpec needs reps >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("SimSpec alpha must lie in (0, 1)");
  }
  if (methods.empty()) throw DomainError("SimSpec needs at least one method");
}

void SweepSpec::validate() const {
  if (g < 2) throw DomainError("SweepSpec needs g >= 2");
  if (m < 1) throw DomainError("SweepSpec needs m >= 1");
  if (reps < 1 || n_scenarios < 1) {
    throw DomainError("SweepSpec needs reps >= 1 and n_scenarios >= 1");
  }
  if (!(cell_floor >= 0.0 && cell_floor < 0.25)) {
    throw DomainError("SweepSpec cell floor must lie in [0, 0.25)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("SweepSpec alpha must lie in (0, 1)");
  }
}

const MethodOutcome& SimSummary::outcome(TestMethod m) const {
  for (const auto& mo : outcomes) {
    if (mo.method == m) return mo;
  }
  throw DomainError("method not present in this summary");
}

FrequencyTable generate_table(const std::vector<double>& pis,
                              const Theta& theta,
                              const std::vector<std::int64_t>& m,
                              RngStream& rng) {
  if (pis.size() != m.size() || pis.empty()) {
    throw DomainError("generate_table needs matching pis and m");
  }
  std::vector<GroupCounts> groups;
  groups.reserve(pis.size());
  for (std::size_t i = 0; i < pis.size(); ++i) {
    const CellProbs p = cell_probs(Rate(pis[i]), theta);
    GroupCounts gc;
    gc.label = std::to_string(i + 1);
    for (std::int64_t j = 0; j < m[i]; ++j) {
      const double u = rng.next_unit();
      if (u < p.p0) {
        ++gc.m0;
      } else if (u < p.p0 + p.p1) {
        ++gc.m1;
      } else {
        ++gc.m2;
      }
    }
    groups.push_back(std::move(gc));
  }
  return FrequencyTable(std::move(groups));
}

SimSummary run_tie(const SimSpec& spec) {
  for (std::size_t i = 1; i < spec.pis.size(); ++i) {
    if (spec.pis[i] != spec.pis[0]) {
      throw H0ViolationInSpec(
          "Type-I-error study requires all rates equal; rate " +
          std::to_string(i + 1) + " differs");
    }
  }
  return run_study(spec, 0);
}

SimSummary run_power(const SimSpec& spec) { return run_study(spec, 0); }

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();
  constexpr std::uint64_t kParamTag = ~std::uint64_t{0};
  constexpr int kMaxProposals = 100000;

  std::vector<SweepRecord> out;
  out.reserve(static_cast<std::size_t>(spec.n_scenarios));
  for (int s = 0; s < spec.n_scenarios; ++s) {
    RngStream rng(spec.seed, static_cast<std::uint64_t>(s), kParamTag);
    double pi = 0.0, tau = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxProposals; ++attempt) {
      pi = rng.next_uniform(0.01, 0.99);
      tau = rng.next_uniform(0.01, 0.95);
      const CellProbs p = cell_probs(Rate(pi), tau_to_theta(tau));
      if (std::min({p.p0, p.p1, p.p2}) > spec.cell_floor) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw SamplingExhausted("scenario " + std::to_string(s) + ": " +
                              std::to_string(kMaxProposals) +
                              " consecutive proposals below the cell floor");
    }

    SimSpec sim;
    sim.g = spec.g;
    sim.m = {spec.m};
    sim.pis = {pi};
    sim.theta = tau_to_theta(tau);
    sim.reps = spec.reps;
    sim.alpha = spec.alpha;
    sim.seed = spec.seed;
    sim.methods = spec.methods;
    sim.threads = spec.threads;

    SweepRecord rec;
    rec.scenario = s;
    rec.pi = pi;
    rec.tau = tau;
    rec.theta = sim.theta.value();
    rec.summary = run_study(sim, static_cast<std::uint64_t>(s));
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace bilat
