#include "q3p/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "q3p/error.hpp"

namespace q3p {

Waveform::Waveform(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw InvalidArgument("waveform needs at least two knots");
  if (knots_.front().time != 0.0) throw InvalidArgument("waveform must start at t = 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].time > knots_[i - 1].time)) {
      throw InvalidArgument("waveform knot times must be strictly increasing");
    }
  }
  for (const auto& k : knots_) {
    if (!std::isfinite(k.value)) throw InvalidArgument("waveform values must be finite");
  }
}

Waveform Waveform::constant(double value, double duration) {
  return Waveform({{0.0, value}, {duration, value}});
}

Waveform Waveform::ramp(double from, double to, double duration) {
  return Waveform({{0.0, from}, {duration, to}});
}

double Waveform::operator()(double t) const {
  if (t < 0.0 || t > duration()) {
    throw InvalidArgument("waveform evaluated at t = " + std::to_string(t) + " outside [0, " +
                          std::to_string(duration()) + "]");
  }
  // First knot strictly after t; the bracketing segment ends there.
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double time, const Knot& k) { return time < k.time; });
  if (hi == knots_.end()) return knots_.back().value;
  const auto lo = std::prev(hi);
  if (t == lo->time) return lo->value;
  const double s = (t - lo->time) / (hi->time - lo->time);
  return lo->value + s * (hi->value - lo->value);
}

double Waveform::min_value() const {
  return std::min_element(knots_.begin(), knots_.end(),
                          [](const Knot& a, const Knot& b) { return a.value < b.value; })
      ->value;
}

double Waveform::max_abs() const {
  double m = 0.0;
  for (const auto& k : knots_) m = std::max(m, std::abs(k.value));
  return m;
}

double PulseProgram::max_abs_delta() const {
  double m = 0.0;
  for (const auto& d : delta) m = std::max(m, d.max_abs());
  return m;
}

void PulseProgram::validate(std::size_t qubits) const {
  if (omega.knots().empty()) throw InvalidArgument("pulse has no Rabi channel");
  if (mode == PulseMode::kGlobal && delta.size() != 1) {
    throw InvalidArgument("global pulse needs exactly one detuning channel");
  }
  if (mode == PulseMode::kLocal && delta.size() != qubits) {
    throw InvalidArgument("local pulse has " + std::to_string(delta.size()) +
                          " detuning channels for " + std::to_string(qubits) + " qubits");
  }
  constexpr double kDurationTolerance = 1e-12;
  for (const auto& d : delta) {
    if (d.knots().empty() || std::abs(d.duration() - omega.duration()) > kDurationTolerance) {
      throw InvalidArgument("all pulse channels must span the same duration");
    }
  }
  // Piecewise-linear: the minimum is attained at a knot.
  if (omega.min_value() < 0.0) throw InvalidArgument("Rabi frequency must be non-negative");
}

PulseProgram PulseProgram::global(Waveform omega, Waveform delta) {
  PulseProgram p{PulseMode::kGlobal, std::move(omega), {std::move(delta)}};
  p.validate(1);
  return p;
}

PulseProgram PulseProgram::local(Waveform omega, std::vector<Waveform> deltas) {
  const auto n = deltas.size();
  PulseProgram p{PulseMode::kLocal, std::move(omega), std::move(deltas)};
  p.validate(n);
  return p;
}

std::vector<double> omega_param_times(std::size_t m, double duration) {
  std::vector<double> t(m);
  for (std::size_t k = 0; k < m; ++k) {
    t[k] = duration * static_cast<double>(k + 1) / static_cast<double>(m + 1);
  }
  return t;
}

std::vector<double> delta_param_times(std::size_t m, double duration) {
  std::vector<double> t(m);
  for (std::size_t k = 0; k < m; ++k) {
    t[k] = duration * static_cast<double>(k) / static_cast<double>(m - 1);
  }
  t.back() = duration;
  return t;
}

PulseProgram parametrized_pulse(std::span<const double> omega_params,
                                std::span<const double> delta_params, double duration,
                                const PulseBounds& bounds) {
  const std::size_t m = omega_params.size();
  if (m < 2) throw InvalidArgument("parametrized pulses need m >= 2 control points");
  if (delta_params.size() != m) throw InvalidArgument("omega and delta need the same number of params");
  if (!(duration > 0.0)) throw InvalidArgument("pulse duration must be positive");
  for (double w : omega_params) {
    if (w < 0.0 || w > bounds.omega_max) {
      throw InvalidArgument("omega parameter " + std::to_string(w) + " outside [0, omega_max]");
    }
  }
  for (double d : delta_params) {
    if (std::abs(d) > bounds.delta_max) {
      throw InvalidArgument("delta parameter " + std::to_string(d) + " outside [-delta_max, delta_max]");
    }
  }
  const auto ot = omega_param_times(m, duration);
  std::vector<Knot> omega_knots{{0.0, 0.0}};
  for (std::size_t k = 0; k < m; ++k) omega_knots.push_back({ot[k], omega_params[k]});
  omega_knots.push_back({duration, 0.0});

  const auto dt = delta_param_times(m, duration);
  std::vector<Knot> delta_knots;
  for (std::size_t k = 0; k < m; ++k) delta_knots.push_back({dt[k], delta_params[k]});
  return PulseProgram::global(Waveform(std::move(omega_knots)), Waveform(std::move(delta_knots)));
}

}  // namespace q3p
