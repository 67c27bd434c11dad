#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "q3p/units.hpp"

namespace q3p {

struct Knot {
  double time = 0.0;   // us
  double value = 0.0;  // rad/us
  friend bool operator==(const Knot&, const Knot&) = default;
};

// Piecewise-linear control channel on [0, T].
class Waveform {
 public:
  Waveform() = default;
  explicit Waveform(std::vector<Knot> knots);
  static Waveform constant(double value, double duration);
  static Waveform ramp(double from, double to, double duration);

  [[nodiscard]] double duration() const noexcept { return knots_.back().time; }
  [[nodiscard]] const std::vector<Knot>& knots() const noexcept { return knots_; }
  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double max_abs() const;

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<Knot> knots_;
};

enum class PulseMode { kGlobal, kLocal };

// Laser program driving the register. In global mode there is exactly one
// detuning channel; in local mode one per qubit. Rabi frequency is shared.
struct PulseProgram {
  PulseMode mode = PulseMode::kGlobal;
  Waveform omega;
  std::vector<Waveform> delta;

  [[nodiscard]] double duration() const noexcept { return omega.duration(); }
  [[nodiscard]] double omega_at(double t) const { return omega(t); }
  [[nodiscard]] double delta_at(std::size_t qubit, double t) const {
    return mode == PulseMode::kGlobal ? delta.front()(t) : delta.at(qubit)(t);
  }
  [[nodiscard]] double max_abs_delta() const;
  // Throws unless channel counts match the mode (and `qubits` in local mode),
  // all channels span the same duration, and omega never goes negative.
  void validate(std::size_t qubits) const;

  static PulseProgram global(Waveform omega, Waveform delta);
  static PulseProgram local(Waveform omega, std::vector<Waveform> deltas);
};

struct PulseBounds {
  double omega_max = units::kDefaultOmegaMax;
  double delta_max = units::kDefaultDeltaMax;
};

// Global program from 2m control values. Omega params sit at the interior
// times T(k+1)/(m+1) with zero knots added at 0 and T; delta params sit at
// T k/(m-1), endpoints included.
PulseProgram parametrized_pulse(std::span<const double> omega_params,
                                std::span<const double> delta_params, double duration,
                                const PulseBounds& bounds);

// Knot times used by parametrized_pulse for each channel.
std::vector<double> omega_param_times(std::size_t m, double duration);
std::vector<double> delta_param_times(std::size_t m, double duration);

}  // namespace q3p
