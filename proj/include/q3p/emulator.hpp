#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "q3p/ising.hpp"
#include "q3p/pulse.hpp"
#include "q3p/random.hpp"
#include "q3p/register.hpp"

// State-vector emulation of the Rydberg Hamiltonian
//
//   H(t) = sum_i Omega_i(t) sigma^x_i - sum_i Delta_i(t) n_i + sum_{i<j} C6/r_ij^6 n_i n_j
//
// Note the sigma^x coefficient is Omega, not Omega/2: a resonant single atom
// is fully excited at Omega * t = pi/2. Basis index bit i holds n_i.
namespace q3p {

inline constexpr std::size_t kMaxEmulatedQubits = 20;

using Amplitude = std::complex<double>;

class QuantumState {
 public:
  QuantumState() = default;
  explicit QuantumState(std::vector<Amplitude> amplitudes);
  static QuantumState ground(std::size_t qubits);
  static QuantumState basis(const Bitstring& bits);

  [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return amplitudes_.size(); }
  [[nodiscard]] const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] std::vector<Amplitude>& amplitudes() noexcept { return amplitudes_; }
  [[nodiscard]] double norm_squared() const noexcept;
  [[nodiscard]] std::vector<double> probabilities() const;
  void normalize();

 private:
  std::size_t qubits_ = 0;
  std::vector<Amplitude> amplitudes_;
};

// Error model fitted on the hardware. Rates are angular (rad/us), Omega
// fluctuations are relative standard deviations.
struct NoiseModel {
  double epsilon = 0.0;        // P(read 1 | atom in 0)
  double epsilon_prime = 0.0;  // P(read 0 | atom in 1)
  double omega_rel_sigma = 0.0;
  double omega_inhomogeneity = 0.0;
  double spacing_sigma = 0.0;
  double delta_shift_sigma = 0.0;
  double gamma_eff = 0.0;
  std::uint64_t seed = 0;

  // Hardware fit: eps = 2 %, eps' = 18 %, 5 % shot-to-shot and 4 % static
  // Omega spread, 1 % spacing, 2 pi x 0.06 MHz detuning shifts,
  // Gamma_eff = 2 pi x 0.05 MHz.
  static NoiseModel hardware_fit();

  [[nodiscard]] bool has_detection_errors() const noexcept { return epsilon > 0.0 || epsilon_prime > 0.0; }
  // Anything that changes the dynamics, so that shots need separate trajectories.
  [[nodiscard]] bool has_dynamical_noise() const noexcept {
    return omega_rel_sigma > 0.0 || omega_inhomogeneity > 0.0 || spacing_sigma > 0.0 ||
           delta_shift_sigma > 0.0 || gamma_eff > 0.0;
  }
  void validate() const;
};

struct SampleHistogram {
  std::map<std::string, std::size_t> counts;
  std::size_t shots = 0;
  std::optional<NoiseModel> noise;

  [[nodiscard]] double frequency(const std::string& bits) const;
  // Most frequent bitstring; ties go to the lexicographically smaller key.
  [[nodiscard]] std::string most_sampled() const;
  // Entries ordered by count descending, then bitstring ascending.
  [[nodiscard]] std::vector<std::pair<std::string, std::size_t>> sorted() const;
  void validate() const;
};

// Largest step satisfying dt <= 1 / (50 * max(Omega_max, Delta_max, U_max) / 2pi).
double max_time_step(const Register& reg, const PulseProgram& pulse);

// dt = 0 selects the largest admissible step that divides T evenly.
QuantumState evolve(const Register& reg, const PulseProgram& pulse, double dt = 0.0);

// One quantum-jump trajectory with jump operators sqrt(Gamma_eff) |0><1|_i,
// plus per-shot Omega scale, detuning offset and array-spacing scale.
QuantumState evolve_trajectory(const Register& reg, const PulseProgram& pulse, const NoiseModel& noise,
                               Rng& rng, double dt = 0.0);

// Draws `shots` bitstrings from |a|^2 and applies detection errors.
// Shot s uses the stream (noise.seed, s).
SampleHistogram sample(const QuantumState& state, std::size_t shots, const NoiseModel& noise);

// Evolves and samples. With dynamical noise each trajectory is a fresh
// stochastic evolution and shot s reads trajectory s mod `trajectories`
// (0 = one trajectory per shot); otherwise a single noiseless evolution is
// sampled.
SampleHistogram run_and_sample(const Register& reg, const PulseProgram& pulse, std::size_t shots,
                               const NoiseModel& noise, std::size_t trajectories = 0,
                               double dt = 0.0);

double occupation(const QuantumState& state, std::size_t qubit);
double occupation_error(double mean, std::size_t shots);
double projector_expectation(const QuantumState& state, const Bitstring& bits);
// Probability of reading `bits` once detection errors are applied.
double readout_probability(const QuantumState& state, const Bitstring& bits, const NoiseModel& noise);

struct Landscape {
  std::vector<double> deltas;     // rows
  std::vector<double> durations;  // columns
  std::vector<std::vector<double>> probability;
  std::size_t shots = 0;
};

// Constant global pulse (omega, delta) applied for each duration. shots = 0
// gives the exact readout probability, otherwise sampled frequencies.
Landscape landscape_scan(const Register& reg, const Bitstring& target, double omega,
                         const std::vector<double>& deltas, const std::vector<double>& durations,
                         std::size_t shots, const NoiseModel& noise);

// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

// Upper bound on worker threads used by the emulator (0 = runtime default).
void set_thread_limit(int threads);

}  // namespace q3p
