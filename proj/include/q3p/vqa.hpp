#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "q3p/emulator.hpp"
#include "q3p/gp.hpp"
#include "q3p/ising.hpp"
#include "q3p/pulse.hpp"
#include "q3p/register.hpp"

namespace q3p {

struct OptimizerConfig {
  std::size_t m = 9;
  std::size_t n_c = 50;
  std::size_t n_r = 10;
  std::size_t shots_per_cycle = 200;  // 0 = exact expectation
  std::size_t final_shots = 0;        // 0 = shots_per_cycle, or 1000 in exact mode
  Minimizer minimizer = Minimizer::kGp;
  PulseBounds bounds;
  double duration = units::kDefaultDuration;
  std::uint64_t seed = 0;
  NoiseModel noise;
  std::size_t trajectories = 0;
  double dt = 0.0;

  // Named settings: "paper-mup" (50 cycles) and "paper-si" (200 cycles),
  // both at 200 shots per cycle.
  static OptimizerConfig preset(std::string_view name);
  void validate() const;
};

struct CycleRecord {
  std::vector<double> params;  // m Omega values then m Delta values
  SampleHistogram histogram;   // empty in exact mode
  double cost_estimate = 0.0;
};

struct VqaResult {
  Placement placement;  // minimal-cost bitstring of the final histogram
  std::string winner;
  std::string most_sampled;
  SampleHistogram histogram;
  std::vector<CycleRecord> trace;
  std::vector<double> best_params;
  std::size_t best_index = 0;
  std::optional<std::string> failure;
};

// Sum over sampled bitstrings of frequency times Ising cost.
double estimate_cost(const PlacementProblem& problem, const SampleHistogram& histogram);

// Dense expectation <psi| H_problem |psi>.
double exact_expectation(const PlacementProblem& problem, const QuantumState& state);

// Global pulse for a 2m parameter vector laid out as in CycleRecord.
PulseProgram vqa_pulse(const std::vector<double>& params, const OptimizerConfig& config);

VqaResult run_vqa(const PlacementProblem& problem, const Register& reg, const OptimizerConfig& config);

}  // namespace q3p
