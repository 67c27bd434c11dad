#include "q3p/emulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include <omp.h>

#include "q3p/error.hpp"

namespace q3p {

namespace {

constexpr std::size_t kParallelDimension = std::size_t{1} << 12;

// Hamiltonian data of one trajectory that stays fixed during the evolution.
struct Dynamics {
  std::size_t qubits = 0;
  std::vector<double> interaction;  // sum_{i<j} U_ij n_i n_j per basis state
  std::vector<double> omega_scale;  // per qubit
  double delta_offset = 0.0;
  double gamma = 0.0;
};

Dynamics make_dynamics(const Register& reg, double spacing_scale) {
  const std::size_t m = reg.size();
  Dynamics d;
  d.qubits = m;
  d.omega_scale.assign(m, 1.0);
  std::vector<double> u(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double r = distance(reg.sites[i], reg.sites[j]) * spacing_scale;
      u[i * m + j] = u[j * m + i] = reg.c6 / std::pow(r, 6);
    }
  }
  const std::size_t dim = std::size_t{1} << m;
  d.interaction.assign(dim, 0.0);
  for (std::size_t s = 1; s < dim; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    const std::size_t rest = s & (s - 1);
    double e = d.interaction[rest];
    for (std::size_t j = low + 1; j < m; ++j) {
      if ((rest >> j) & 1U) e += u[low * m + j];
    }
    d.interaction[s] = e;
  }
  return d;
}

// Per-step workspace for the Chebyshev propagator.
struct Workspace {
  std::vector<double> energy;  // diagonal of H at the current step
  std::vector<Amplitude> prev, cur, next, acc;
};

// Diagonal of H: interaction - sum_i Delta_i n_i.
void fill_diagonal(const Dynamics& dyn, const std::vector<double>& deltas, std::vector<double>& energy) {
  const std::size_t dim = energy.size();
  energy[0] = 0.0;
  for (std::size_t s = 1; s < dim; ++s) {
    energy[s] = energy[s & (s - 1)] - deltas[static_cast<std::size_t>(std::countr_zero(s))];
  }
  for (std::size_t s = 0; s < dim; ++s) energy[s] += dyn.interaction[s];
}

// out = ((H - centre) / half_width) v.
void apply_scaled(const std::vector<double>& energy, const std::vector<double>& omegas, double centre,
                  double half_width, const std::vector<Amplitude>& v, std::vector<Amplitude>& out) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const double inv = 1.0 / half_width;
  const std::size_t m = omegas.size();
#pragma omp parallel for schedule(static) if (v.size() >= kParallelDimension)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto us = static_cast<std::size_t>(s);
    Amplitude x = (energy[us] - centre) * v[us];
    for (std::size_t q = 0; q < m; ++q) x += omegas[q] * v[us ^ (std::size_t{1} << q)];
    out[us] = x * inv;
  }
}

// psi <- exp(-i H tau) psi for H = diag(energy) + sum_q omega_q sigma^x_q,
// by Chebyshev expansion over the Gershgorin interval of H.
void propagate(std::vector<Amplitude>& psi, const std::vector<double>& omegas, double tau, Workspace& w) {
  const auto [lo_it, hi_it] = std::minmax_element(w.energy.begin(), w.energy.end());
  double spread = 0.0;
  for (double o : omegas) spread += std::abs(o);
  const double lo = *lo_it - spread;
  const double hi = *hi_it + spread;
  const double centre = 0.5 * (lo + hi);
  const double half_width = 0.5 * (hi - lo);
  const Amplitude global = std::polar(1.0, -centre * tau);
  const std::size_t dim = psi.size();
  if (half_width * tau < 1e-300) {
    for (auto& a : psi) a *= global;
    return;
  }
  const double x = half_width * tau;
  w.prev = psi;
  w.cur.resize(dim);
  w.next.resize(dim);
  w.acc.resize(dim);
  apply_scaled(w.energy, omegas, centre, half_width, w.prev, w.cur);
  const double j0 = std::cyl_bessel_j(0.0, x);
  Amplitude coeff = 2.0 * Amplitude{0.0, -1.0} * std::cyl_bessel_j(1.0, x);
  for (std::size_t s = 0; s < dim; ++s) w.acc[s] = j0 * w.prev[s] + coeff * w.cur[s];
  for (std::size_t k = 2;; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
    if (static_cast<double>(k) > x && std::abs(jk) < 1e-17) break;
    apply_scaled(w.energy, omegas, centre, half_width, w.cur, w.next);
    const Amplitude ck = 2.0 * std::pow(Amplitude{0.0, -1.0}, static_cast<int>(k % 4)) * jk;
    for (std::size_t s = 0; s < dim; ++s) {
      w.next[s] = 2.0 * w.next[s] - w.prev[s];
      w.acc[s] += ck * w.next[s];
    }
    std::swap(w.prev, w.cur);
    std::swap(w.cur, w.next);
  }
  for (std::size_t s = 0; s < dim; ++s) psi[s] = global * w.acc[s];
}

// Non-Hermitian part exp(-Gamma/2 sum_i n_i tau) of the no-jump evolution.
void apply_damping(std::vector<Amplitude>& psi, double gamma, double tau) {
  const double rate = 0.5 * gamma * tau;
  for (std::size_t s = 0; s < psi.size(); ++s) psi[s] *= std::exp(-rate * std::popcount(s));
}

std::size_t step_count(double duration, double dt, double dt_max) {
  if (dt == 0.0) dt = dt_max;
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw InvalidArgument("time step " + std::to_string(dt) + " us is coarser than the resolution limit " +
                          std::to_string(dt_max) + " us");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)));
}

void check_size(const Register& reg, const PulseProgram& pulse) {
  reg.validate();
  if (reg.size() > kMaxEmulatedQubits) {
    throw InvalidArgument("cannot emulate " + std::to_string(reg.size()) + " qubits, the limit is " +
                          std::to_string(kMaxEmulatedQubits));
  }
  pulse.validate(reg.size());
}

void apply_jump(std::vector<Amplitude>& psi, std::size_t qubits, double u) {
  std::vector<double> weight(qubits, 0.0);
  for (std::size_t s = 0; s < psi.size(); ++s) {
    const double p = std::norm(psi[s]);
    for (std::size_t q = 0; q < qubits; ++q) {
      if ((s >> q) & 1U) weight[q] += p;
    }
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  if (!(total > 0.0)) return;
  double acc = 0.0;
  std::size_t chosen = qubits - 1;
  for (std::size_t q = 0; q < qubits; ++q) {
    acc += weight[q];
    if (u * total < acc) {
      chosen = q;
      break;
    }
  }
  // |0><1| on the chosen qubit: amplitudes with the bit clear are annihilated,
  // the others move down.
  const std::size_t bit = std::size_t{1} << chosen;
  for (std::size_t s = 0; s < psi.size(); ++s) {
    if (!(s & bit)) {
      psi[s] = psi[s | bit];
      psi[s | bit] = 0.0;
    }
  }
}

// Shared integrator: one exact exponential of the midpoint Hamiltonian per
// step. Jump damping is split symmetrically around it.
QuantumState integrate(const PulseProgram& pulse, const Dynamics& dyn, double dt_requested,
                       double dt_max, Rng* rng) {
  const double duration = pulse.duration();
  const std::size_t steps = step_count(duration, dt_requested, dt_max);
  const double dt = duration / static_cast<double>(steps);
  const std::size_t m = dyn.qubits;

  QuantumState state = QuantumState::ground(m);
  auto& psi = state.amplitudes();
  Workspace work;
  work.energy.assign(psi.size(), 0.0);
  std::vector<double> deltas(m), omegas(m);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const bool jumps = dyn.gamma > 0.0 && rng != nullptr;
  double threshold = jumps ? uniform(*rng) : 0.0;

  for (std::size_t k = 0; k < steps; ++k) {
    const double tm = std::min(duration, (static_cast<double>(k) + 0.5) * dt);
    const double omega = pulse.omega_at(tm);
    for (std::size_t q = 0; q < m; ++q) {
      omegas[q] = omega * dyn.omega_scale[q];
      deltas[q] = pulse.delta_at(q, tm) + dyn.delta_offset;
    }
    fill_diagonal(dyn, deltas, work.energy);
    if (jumps) apply_damping(psi, dyn.gamma, 0.5 * dt);
    propagate(psi, omegas, dt, work);
    if (jumps) apply_damping(psi, dyn.gamma, 0.5 * dt);
    if (jumps && state.norm_squared() < threshold) {
      apply_jump(psi, m, uniform(*rng));
      state.normalize();
      threshold = uniform(*rng);
    }
  }
  if (jumps) state.normalize();
  return state;
}

}  // namespace

QuantumState::QuantumState(std::vector<Amplitude> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty() || !std::has_single_bit(amplitudes_.size())) {
    throw InvalidArgument("state dimension must be a power of two");
  }
  qubits_ = static_cast<std::size_t>(std::countr_zero(amplitudes_.size()));
}

QuantumState QuantumState::ground(std::size_t qubits) {
  if (qubits > kMaxEmulatedQubits) throw InvalidArgument("too many qubits for a state vector");
  std::vector<Amplitude> a(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
  a[0] = 1.0;
  return QuantumState(std::move(a));
}

QuantumState QuantumState::basis(const Bitstring& bits) {
  QuantumState s = ground(bits.size());
  s.amplitudes_[0] = 0.0;
  s.amplitudes_[bits.mask()] = 1.0;
  return s;
}

double QuantumState::norm_squared() const noexcept {
  double n = 0.0;
  for (const auto& a : amplitudes_) n += std::norm(a);
  return n;
}

std::vector<double> QuantumState::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitudes_[i]);
  return p;
}

void QuantumState::normalize() {
  const double n = std::sqrt(norm_squared());
  if (!(n > 0.0)) throw Error("cannot normalize a zero state");
  for (auto& a : amplitudes_) a /= n;
}

NoiseModel NoiseModel::hardware_fit() {
  NoiseModel n;
  n.epsilon = 0.02;
  n.epsilon_prime = 0.18;
  n.omega_rel_sigma = 0.05;
  n.omega_inhomogeneity = 0.04;
  n.spacing_sigma = 0.01;
  n.delta_shift_sigma = units::mhz(0.06);
  n.gamma_eff = units::mhz(0.05);
  return n;
}

void NoiseModel::validate() const {
  if (epsilon < 0.0 || epsilon > 1.0 || epsilon_prime < 0.0 || epsilon_prime > 1.0) {
    throw InvalidArgument("detection error probabilities must lie in [0, 1]");
  }
  if (omega_rel_sigma < 0.0 || omega_inhomogeneity < 0.0 || spacing_sigma < 0.0 ||
      delta_shift_sigma < 0.0 || gamma_eff < 0.0) {
    throw InvalidArgument("noise spreads and rates must be non-negative");
  }
}

double SampleHistogram::frequency(const std::string& bits) const {
  if (shots == 0) return 0.0;
  const auto it = counts.find(bits);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(shots);
}

std::string SampleHistogram::most_sampled() const {
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [bits, count] : counts) {
    if (count > best_count) {
      best = bits;
      best_count = count;
    }
  }
  return best;
}

std::vector<std::pair<std::string, std::size_t>> SampleHistogram::sorted() const {
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

void SampleHistogram::validate() const {
  std::size_t total = 0;
  for (const auto& [bits, count] : counts) total += count;
  if (total != shots) throw InvalidArgument("histogram counts do not add up to the shot total");
}

double max_time_step(const Register& reg, const PulseProgram& pulse) {
  double u_max = 0.0;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    for (std::size_t j = i + 1; j < reg.size(); ++j) {
      u_max = std::max(u_max, reg.c6 / std::pow(distance(reg.sites[i], reg.sites[j]), 6));
    }
  }
  const double rate = std::max({pulse.omega.max_abs(), pulse.max_abs_delta(), u_max});
  if (rate == 0.0) return pulse.duration();
  return 1.0 / (50.0 * rate / units::kTwoPi);
}

QuantumState evolve(const Register& reg, const PulseProgram& pulse, double dt) {
  check_size(reg, pulse);
  const Dynamics dyn = make_dynamics(reg, 1.0);
  return integrate(pulse, dyn, dt, max_time_step(reg, pulse), nullptr);
}

QuantumState evolve_trajectory(const Register& reg, const PulseProgram& pulse, const NoiseModel& noise,
                               Rng& rng, double dt) {
  check_size(reg, pulse);
  noise.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  const double omega_factor = 1.0 + noise.omega_rel_sigma * normal(rng);
  const double delta_offset = noise.delta_shift_sigma * normal(rng);
  const double spacing_scale = 1.0 + noise.spacing_sigma * normal(rng);

  Dynamics dyn = make_dynamics(reg, spacing_scale);
  Rng static_rng = make_rng(noise.seed, Stream::kStaticNoise);
  std::normal_distribution<double> static_normal(0.0, 1.0);
  for (auto& s : dyn.omega_scale) {
    s = omega_factor * (1.0 + noise.omega_inhomogeneity * static_normal(static_rng));
  }
  dyn.delta_offset = delta_offset;
  dyn.gamma = noise.gamma_eff;
  return integrate(pulse, dyn, dt, max_time_step(reg, pulse), &rng);
}

namespace {

std::uint32_t draw_outcome(const std::vector<double>& cdf, std::size_t qubits, const NoiseModel& noise,
                           Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  auto outcome = static_cast<std::uint32_t>(it - cdf.begin());
  if (noise.has_detection_errors()) {
    for (std::size_t q = 0; q < qubits; ++q) {
      const std::uint32_t bit = 1U << q;
      const double flip = (outcome & bit) ? noise.epsilon_prime : noise.epsilon;
      if (uniform(rng) < flip) outcome ^= bit;
    }
  }
  return outcome;
}

std::vector<double> cumulative(const QuantumState& state) {
  std::vector<double> cdf = state.probabilities();
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  return cdf;
}

SampleHistogram to_histogram(const std::vector<std::uint32_t>& outcomes, std::size_t qubits,
                             const NoiseModel& noise) {
  SampleHistogram h;
  h.shots = outcomes.size();
  for (auto o : outcomes) ++h.counts[Bitstring::from_mask(o, qubits).str()];
  if (noise.has_detection_errors() || noise.has_dynamical_noise()) h.noise = noise;
  return h;
}

}  // namespace

SampleHistogram sample(const QuantumState& state, std::size_t shots, const NoiseModel& noise) {
  if (shots == 0) throw InvalidArgument("at least one shot is required");
  noise.validate();
  const auto cdf = cumulative(state);
  std::vector<std::uint32_t> outcomes(shots);
  const auto n = static_cast<std::ptrdiff_t>(shots);
#pragma omp parallel for schedule(static) if (shots >= 4096)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    Rng rng = make_rng(noise.seed, Stream::kShot, static_cast<std::uint64_t>(s));
    outcomes[static_cast<std::size_t>(s)] = draw_outcome(cdf, state.qubits(), noise, rng);
  }
  return to_histogram(outcomes, state.qubits(), noise);
}

SampleHistogram run_and_sample(const Register& reg, const PulseProgram& pulse, std::size_t shots,
                               const NoiseModel& noise, std::size_t trajectories, double dt) {
  if (shots == 0) throw InvalidArgument("at least one shot is required");
  noise.validate();
  if (!noise.has_dynamical_noise()) return sample(evolve(reg, pulse, dt), shots, noise);

  const std::size_t n_traj = (trajectories == 0) ? shots : std::min(trajectories, shots);
  std::vector<std::uint32_t> outcomes(shots);
  const auto n = static_cast<std::ptrdiff_t>(n_traj);
  // Trajectories are independent; the per-index streams make the outcome
  // identical for any thread count.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    Rng traj_rng = make_rng(noise.seed, Stream::kTrajectory, ut);
    const QuantumState state = evolve_trajectory(reg, pulse, noise, traj_rng, dt);
    const auto cdf = cumulative(state);
    for (std::size_t s = static_cast<std::size_t>(t); s < shots; s += n_traj) {
      Rng rng = make_rng(noise.seed, Stream::kShot, s);
      outcomes[s] = draw_outcome(cdf, state.qubits(), noise, rng);
    }
  }
  return to_histogram(outcomes, reg.size(), noise);
}

double occupation(const QuantumState& state, std::size_t qubit) {
  if (qubit >= state.qubits()) throw InvalidArgument("qubit index out of range");
  double p = 0.0;
  const auto& a = state.amplitudes();
  for (std::size_t s = 0; s < a.size(); ++s) {
    if ((s >> qubit) & 1U) p += std::norm(a[s]);
  }
  return p;
}

double occupation_error(double mean, std::size_t shots) {
  if (shots == 0) throw InvalidArgument("shot count must be positive");
  return std::sqrt(mean * (1.0 - mean) / static_cast<double>(shots));
}

double projector_expectation(const QuantumState& state, const Bitstring& bits) {
  if (bits.size() != state.qubits()) throw InvalidArgument("bitstring length does not match the state");
  return std::norm(state.amplitudes()[bits.mask()]);
}

double readout_probability(const QuantumState& state, const Bitstring& bits, const NoiseModel& noise) {
  if (!noise.has_detection_errors()) return projector_expectation(state, bits);
  if (bits.size() != state.qubits()) throw InvalidArgument("bitstring length does not match the state");
  const std::uint32_t target = bits.mask();
  const auto& a = state.amplitudes();
  double total = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    double p = std::norm(a[s]);
    if (p == 0.0) continue;
    for (std::size_t q = 0; q < state.qubits(); ++q) {
      const bool actual = (s >> q) & 1U;
      const bool read = (target >> q) & 1U;
      if (actual) {
        p *= read ? 1.0 - noise.epsilon_prime : noise.epsilon_prime;
      } else {
        p *= read ? noise.epsilon : 1.0 - noise.epsilon;
      }
    }
    total += p;
  }
  return total;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return v;
}

Landscape landscape_scan(const Register& reg, const Bitstring& target, double omega,
                         const std::vector<double>& deltas, const std::vector<double>& durations,
                         std::size_t shots, const NoiseModel& noise) {
  if (deltas.size() < 2 || durations.size() < 2) throw InvalidArgument("landscape grid must be at least 2x2");
  if (target.size() != reg.size()) throw InvalidArgument("target bitstring length does not match the register");
  for (double t : durations) {
    if (t < 0.0) throw InvalidArgument("durations must be non-negative");
  }
  noise.validate();
  Landscape out{deltas, durations,
                std::vector<std::vector<double>>(deltas.size(), std::vector<double>(durations.size(), 0.0)),
                shots};
  const std::size_t cols = durations.size();
  const auto cells = static_cast<std::ptrdiff_t>(deltas.size() * cols);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const std::size_t row = static_cast<std::size_t>(c) / cols;
    const std::size_t col = static_cast<std::size_t>(c) % cols;
    const double duration = durations[col];
    NoiseModel cell_noise = noise;
    cell_noise.seed = derive_seed(noise.seed, Stream::kLandscape, static_cast<std::uint64_t>(c));
    double p = 0.0;
    if (duration == 0.0) {
      // No evolution: the register is still in |0...0>.
      const QuantumState ground = QuantumState::ground(reg.size());
      p = shots == 0 ? readout_probability(ground, target, noise)
                     : sample(ground, shots, cell_noise).frequency(target.str());
    } else {
      const auto pulse = PulseProgram::global(Waveform::constant(omega, duration),
                                              Waveform::constant(deltas[row], duration));
      if (shots == 0) {
        p = readout_probability(evolve(reg, pulse), target, noise);
      } else {
        p = run_and_sample(reg, pulse, shots, cell_noise).frequency(target.str());
      }
    }
    out.probability[row][col] = p;
  }
  return out;
}

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace q3p
