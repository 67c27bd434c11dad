#pragma once

#include <span>
#include <vector>

#include "q3p/emulator.hpp"
#include "q3p/ising.hpp"
#include "q3p/pulse.hpp"
#include "q3p/register.hpp"
#include "q3p/units.hpp"

namespace q3p {

struct AdiabaticSchedule {
  double duration = units::kDefaultDuration;
  double omega_max = units::kDefaultOmegaMax;
  double initial_detuning = units::kDefaultDeltaMax;  // c: the ramp starts at -c
  double delta_max = units::kDefaultDeltaMax;
  std::vector<double> final_deltas;

  void validate() const;
};

// Centre each Gamma_i on the mean of its blockade neighbours, then rescale so
// the largest magnitude equals delta_max. Isolated nodes keep Gamma_i; an
// all-zero result stays zero.
std::vector<double> map_detunings(std::span<const double> gamma, const BlockadeGraph& graph,
                                  double delta_max);

// Shared triangular Omega through (0, 0), (T/2, omega_max), (T, 0) and per-qubit
// linear detuning ramps from -c to final_deltas[i].
PulseProgram build_adiabatic_pulse(const AdiabaticSchedule& schedule);

struct QaeResult {
  Placement placement;  // minimal-cost sampled bitstring
  SampleHistogram histogram;
  std::string winner;
  std::string most_sampled;
  std::vector<double> final_deltas;
};

struct QaeOptions {
  AdiabaticSchedule schedule;  // final_deltas are filled in from the problem
  std::size_t shots = 1000;
  NoiseModel noise;
  std::size_t trajectories = 0;
  double dt = 0.0;
};

// Adiabatic run: detunings from problem.gamma, local evolution, sampling,
// and selection of the sampled bitstring with the lowest Ising cost.
QaeResult run_qae(const PlacementProblem& problem, const Register& reg, const QaeOptions& options);

// Lowest-cost key of a histogram (ties: fewer excitations, then
// lowest-index-first).
std::string min_cost_bitstring(const PlacementProblem& problem, const SampleHistogram& histogram);

}  // namespace q3p
