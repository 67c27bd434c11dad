#include "q3p/vqa.hpp"

#include <span>

#include "q3p/error.hpp"
#include "q3p/qae.hpp"
#include "q3p/random.hpp"

namespace q3p {

OptimizerConfig OptimizerConfig::preset(std::string_view name) {
  OptimizerConfig c;
  c.shots_per_cycle = 200;
  if (name == "paper-mup") {
    c.n_c = 50;
  } else if (name == "paper-si") {
    c.n_c = 200;
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

void OptimizerConfig::validate() const {
  if (m < 2 || m > 25) throw InvalidArgument("m must lie in [2, 25]");
  if (n_r < 1 || n_r >= n_c) throw InvalidArgument("need 1 <= n_r < n_c");
  if (!(bounds.omega_max > 0.0) || !(bounds.delta_max > 0.0)) throw InvalidArgument("pulse bounds must be positive");
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  noise.validate();
}

double estimate_cost(const PlacementProblem& problem, const SampleHistogram& histogram) {
  if (histogram.shots == 0) throw InvalidArgument("histogram has no shots");
  double total = 0.0;
  for (const auto& [key, count] : histogram.counts) {
    total += static_cast<double>(count) * cost(problem, Bitstring::parse(key));
  }
  return total / static_cast<double>(histogram.shots);
}

double exact_expectation(const PlacementProblem& problem, const QuantumState& state) {
  if (state.qubits() != problem.size()) throw InvalidArgument("state and problem differ in qubit count");
  const auto& a = state.amplitudes();
  double total = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) {
    const double p = std::norm(a[b]);
    if (p != 0.0) total += p * cost(problem, static_cast<std::uint32_t>(b));
  }
  return total / state.norm_squared();
}

PulseProgram vqa_pulse(const std::vector<double>& params, const OptimizerConfig& config) {
  if (params.size() != 2 * config.m) throw InvalidArgument("expected 2m pulse parameters");
  const std::span<const double> all(params);
  return parametrized_pulse(all.first(config.m), all.subspan(config.m), config.duration, config.bounds);
}

VqaResult run_vqa(const PlacementProblem& problem, const Register& reg, const OptimizerConfig& config) {
  config.validate();
  problem.validate();
  reg.validate();
  if (problem.size() != reg.size()) throw InvalidArgument("problem and register differ in site count");

  VqaResult result;
  const auto run_cycle = [&](const std::vector<double>& params, std::size_t k) {
    const auto pulse = vqa_pulse(params, config);
    CycleRecord record{params, {}, 0.0};
    if (config.shots_per_cycle == 0) {
      record.cost_estimate = exact_expectation(problem, evolve(reg, pulse, config.dt));
    } else {
      NoiseModel noise = config.noise;
      noise.seed = derive_seed(config.seed, Stream::kCycle, k);
      record.histogram = run_and_sample(reg, pulse, config.shots_per_cycle, noise, config.trajectories, config.dt);
      record.cost_estimate = estimate_cost(problem, record.histogram);
    }
    return record;
  };

  BayesOptions opts;
  opts.lower.assign(2 * config.m, 0.0);
  opts.upper.assign(2 * config.m, 1.0);
  for (std::size_t i = config.m; i < 2 * config.m; ++i) opts.lower[i] = -1.0;
  opts.n_calls = config.n_c;
  opts.n_random = config.n_r;
  opts.minimizer = config.minimizer;
  opts.seed = config.seed;

  // The optimizer works on Omega / omega_max and Delta / delta_max.
  const auto to_pulse_units = [&](const std::vector<double>& u) {
    std::vector<double> p(u);
    for (std::size_t i = 0; i < config.m; ++i) p[i] *= config.bounds.omega_max;
    for (std::size_t i = config.m; i < 2 * config.m; ++i) p[i] *= config.bounds.delta_max;
    return p;
  };
  const auto bo = bayesian_minimize(
      [&](const std::vector<double>& u) {
        auto record = run_cycle(to_pulse_units(u), result.trace.size());
        const double j = record.cost_estimate;
        result.trace.push_back(std::move(record));
        return j;
      },
      opts);
  result.failure = bo.failure;
  if (result.trace.empty()) throw Error("optimizer failed before any cycle: " + bo.failure.value_or("unknown"));
  result.best_index = bo.best_index;
  result.best_params = result.trace[bo.best_index].params;

  std::size_t shots = config.final_shots;
  if (shots == 0) shots = config.shots_per_cycle == 0 ? 1000 : config.shots_per_cycle;
  NoiseModel noise = config.noise;
  noise.seed = derive_seed(config.seed, Stream::kCycle, config.n_c);
  result.histogram = run_and_sample(reg, vqa_pulse(result.best_params, config), shots, noise,
                                    config.trajectories, config.dt);
  result.winner = min_cost_bitstring(problem, result.histogram);
  result.most_sampled = result.histogram.most_sampled();
  result.placement = extract_placement(problem, Bitstring::parse(result.winner));
  return result;
}

}  // namespace q3p
