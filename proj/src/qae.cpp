#include "q3p/qae.hpp"

#include <algorithm>
#include <cmath>

#include "q3p/error.hpp"

namespace q3p {

void AdiabaticSchedule::validate() const {
  if (!(duration > 0.0)) throw InvalidArgument("adiabatic duration must be positive");
  if (!(omega_max > 0.0)) throw InvalidArgument("omega_max must be positive");
  if (!(initial_detuning > 0.0)) throw InvalidArgument("initial detuning magnitude c must be positive");
  if (!(delta_max > 0.0)) throw InvalidArgument("delta_max must be positive");
  for (double d : final_deltas) {
    if (std::abs(d) > delta_max * (1.0 + 1e-12)) {
      throw InvalidArgument("final detuning exceeds delta_max");
    }
  }
}

std::vector<double> map_detunings(std::span<const double> gamma, const BlockadeGraph& graph,
                                  double delta_max) {
  if (!(delta_max > 0.0)) throw InvalidArgument("delta_max must be positive");
  if (gamma.size() != graph.nodes) throw InvalidArgument("gamma length does not match the graph");
  std::vector<double> centred(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const auto nbrs = graph.neighbors(i);
    if (nbrs.empty()) {
      centred[i] = gamma[i];
      continue;
    }
    double mean = 0.0;
    for (auto j : nbrs) mean += gamma[j];
    centred[i] = gamma[i] - mean / static_cast<double>(nbrs.size());
  }
  double largest = 0.0;
  for (double d : centred) largest = std::max(largest, std::abs(d));
  if (largest == 0.0) return std::vector<double>(gamma.size(), 0.0);
  for (double& d : centred) d *= delta_max / largest;
  return centred;
}

PulseProgram build_adiabatic_pulse(const AdiabaticSchedule& schedule) {
  schedule.validate();
  if (schedule.final_deltas.empty()) throw InvalidArgument("schedule has no qubits");
  const double t = schedule.duration;
  Waveform omega({{0.0, 0.0}, {0.5 * t, schedule.omega_max}, {t, 0.0}});
  std::vector<Waveform> deltas;
  deltas.reserve(schedule.final_deltas.size());
  for (double d : schedule.final_deltas) deltas.push_back(Waveform::ramp(-schedule.initial_detuning, d, t));
  return PulseProgram::local(std::move(omega), std::move(deltas));
}

std::string min_cost_bitstring(const PlacementProblem& problem, const SampleHistogram& histogram) {
  if (histogram.counts.empty()) throw InvalidArgument("empty histogram");
  std::uint32_t best = 0;
  double best_cost = 0.0;
  bool first = true;
  for (const auto& [key, count] : histogram.counts) {
    const std::uint32_t mask = Bitstring::parse(key).mask();
    const double c = cost(problem, Bitstring::parse(key));
    if (first || better_solution(c, mask, best_cost, best)) {
      best = mask;
      best_cost = c;
      first = false;
    }
  }
  return Bitstring::from_mask(best, problem.size()).str();
}

QaeResult run_qae(const PlacementProblem& problem, const Register& reg, const QaeOptions& options) {
  problem.validate();
  reg.validate();
  if (problem.size() != reg.size()) throw InvalidArgument("problem and register differ in site count");
  AdiabaticSchedule schedule = options.schedule;
  const auto graph = blockade_graph(reg, reg.blockade_radius);
  schedule.final_deltas = map_detunings(problem.gamma, graph, schedule.delta_max);
  const auto pulse = build_adiabatic_pulse(schedule);

  QaeResult result;
  result.final_deltas = schedule.final_deltas;
  result.histogram = run_and_sample(reg, pulse, options.shots, options.noise, options.trajectories, options.dt);
  result.winner = min_cost_bitstring(problem, result.histogram);
  result.most_sampled = result.histogram.most_sampled();
  result.placement = extract_placement(problem, Bitstring::parse(result.winner));
  return result;
}

}  // namespace q3p
