#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "q3p/emulator.hpp"
#include "q3p/error.hpp"
#include "q3p/ising.hpp"
#include "q3p/qae.hpp"
#include "q3p/units.hpp"

using namespace q3p;

namespace {

Register line_register(std::size_t n, double a) {
  std::vector<Point2> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back({a * static_cast<double>(i), 0.0});
  return Register::from_sites(s, units::kDefaultC6, blockade_radius_for(units::kDefaultC6, units::kDefaultOmegaMax));
}

// Sites on a line one unit apart in field coordinates; neighbours overlap strongly.
PlacementProblem line_problem(std::vector<double> gamma) {
  const std::size_t n = gamma.size();
  PlacementProblem p;
  for (std::size_t i = 0; i < n; ++i) p.sites.push_back({static_cast<double>(i), 0.0});
  p.gamma = std::move(gamma);
  p.amplitudes.assign(n, 1.0);
  p.v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto d = static_cast<double>(i > j ? i - j : j - i);
      p.v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 2.0 * std::exp(-2.0 * d * d);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("detuning map examples") {
  const auto path = BlockadeGraph::from_edges(3, {{0, 1}, {1, 2}});
  const std::vector<double> g{1.0, 2.0, 1.0};
  const auto d = map_detunings(g, path, 4.0);
  CHECK(d == std::vector<double>{-4.0, 4.0, -4.0});

  const auto isolated = BlockadeGraph::from_edges(2, {});
  const std::vector<double> g2{3.0, -1.0};
  const auto d2 = map_detunings(g2, isolated, 6.0);
  CHECK(d2[0] == doctest::Approx(6.0));
  CHECK(d2[1] == doctest::Approx(-2.0));

  const std::vector<double> flat{0.7, 0.7, 0.7};
  for (double x : map_detunings(flat, path, 4.0)) CHECK(x == 0.0);
  CHECK_THROWS_AS(map_detunings(g, path, 0.0), InvalidArgument);
  CHECK_THROWS_AS(map_detunings(g2, path, 1.0), InvalidArgument);
}

TEST_CASE("detuning map ignores shifts and positive scales of Gamma") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        if (u(rng) > 0.2) edges.emplace_back(i, j);
      }
    }
    const auto graph = BlockadeGraph::from_edges(6, edges);
    std::vector<double> g(6);
    for (auto& x : g) x = u(rng);
    const auto base = map_detunings(g, graph, 5.0);
    auto shifted = g, scaled = g;
    for (auto& x : shifted) x += 2.5;
    for (auto& x : scaled) x *= 3.0;
    const auto a = map_detunings(shifted, graph, 5.0);
    const auto b = map_detunings(scaled, graph, 5.0);
    // Isolated nodes keep their raw Gamma, so shifts cancel only without them.
    bool connected = true;
    for (std::size_t i = 0; i < 6; ++i) connected = connected && !graph.neighbors(i).empty();
    double largest = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(b[i] == doctest::Approx(base[i]).epsilon(1e-12));
      largest = std::max(largest, std::abs(base[i]));
      if (connected) CHECK(a[i] == doctest::Approx(base[i]).epsilon(1e-9));
    }
    CHECK(largest == doctest::Approx(5.0));
  }
}

TEST_CASE("adiabatic pulse shape") {
  AdiabaticSchedule s;
  s.duration = 3.0;
  s.omega_max = 7.0;
  s.initial_detuning = 9.0;
  s.delta_max = 10.0;
  s.final_deltas = {10.0, -4.0, 0.0};
  const auto p = build_adiabatic_pulse(s);
  CHECK(p.duration() == 3.0);
  CHECK(p.omega_at(0.0) == 0.0);
  CHECK(p.omega_at(1.5) == 7.0);
  CHECK(p.omega_at(3.0) == 0.0);
  CHECK(p.omega_at(0.75) == doctest::Approx(3.5));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p.delta_at(i, 0.0) == -9.0);
    CHECK(p.delta_at(i, 3.0) == s.final_deltas[i]);
    CHECK(p.delta_at(i, 1.5) == doctest::Approx(0.5 * (-9.0 + s.final_deltas[i])));
  }
  s.final_deltas = {11.0};
  CHECK_THROWS_AS(build_adiabatic_pulse(s), InvalidArgument);
  s.final_deltas = {1.0};
  s.initial_detuning = 0.0;
  CHECK_THROWS_AS(build_adiabatic_pulse(s), InvalidArgument);
}

TEST_CASE("equal final detunings behave like a global pulse") {
  const auto reg = line_register(3, 6.0);
  AdiabaticSchedule s;
  s.duration = 2.0;
  s.final_deltas.assign(3, 12.0);
  const auto local = build_adiabatic_pulse(s);
  const auto global = PulseProgram::global(
      Waveform({{0.0, 0.0}, {1.0, s.omega_max}, {2.0, 0.0}}), Waveform({{0.0, -s.initial_detuning}, {2.0, 12.0}}));
  const auto a = evolve(reg, local);
  const auto b = evolve(reg, global);
  for (std::size_t i = 0; i < a.dimension(); ++i) CHECK(std::abs(a.amplitudes()[i] - b.amplitudes()[i]) < 1e-12);
}

TEST_CASE("single favourable site is always placed") {
  PlacementProblem p = line_problem({0.4});
  const auto reg = line_register(1, 5.0);
  QaeOptions o;
  o.shots = 200;
  o.noise.seed = 3;
  const auto r = run_qae(p, reg, o);
  CHECK(r.winner == "1");
  CHECK(r.winner == exact_solve(p, false).bits.str());
  CHECK(r.placement.count == 1);
  CHECK(r.histogram.shots == 200);
  o.shots = 1;
  const auto one = run_qae(p, reg, o);
  CHECK(one.histogram.counts.size() == 1);
  CHECK(one.winner == one.histogram.counts.begin()->first);
}

TEST_CASE("winner is the cheapest sampled bitstring") {
  const auto p = line_problem({1.0, 0.2, 0.3, 1.0});
  const auto reg = line_register(4, 6.0);
  QaeOptions o;
  o.shots = 300;
  o.noise = NoiseModel::hardware_fit();
  o.noise.seed = 11;
  o.trajectories = 20;
  o.schedule.duration = 1.0;
  const auto r = run_qae(p, reg, o);
  REQUIRE(r.histogram.counts.size() > 1);
  const double best = cost(p, Bitstring::parse(r.winner));
  for (const auto& [key, count] : r.histogram.counts) CHECK(best <= cost(p, Bitstring::parse(key)));
  CHECK(r.placement.cost == best);
  CHECK(r.most_sampled == r.histogram.most_sampled());
}

TEST_CASE("noiseless QAE finds the optimum of a blockaded chain") {
  const auto p = line_problem({1.0, 0.2, 0.3, 1.0});
  const auto reg = line_register(4, 6.0);
  QaeOptions o;
  o.noise.seed = 5;
  const auto r = run_qae(p, reg, o);
  CHECK(r.winner == exact_solve(p, false).bits.str());
  CHECK(r.winner == "1001");
  CHECK(r.histogram.frequency(r.winner) >= 0.3);
}

TEST_CASE("longer schedules end closer to the final ground state") {
  const auto p = line_problem({1.0, 0.2, 0.3, 1.0});
  const auto reg = line_register(4, 6.0);
  const auto graph = blockade_graph(reg, reg.blockade_radius);
  AdiabaticSchedule s;
  s.final_deltas = map_detunings(p.gamma, graph, s.delta_max);
  // Ground state of the Omega = 0 Hamiltonian at t = T by full diagonalisation.
  const auto h = oracle::rydberg_hamiltonian(reg.sites, reg.c6, std::vector<double>(4, 0.0), s.final_deltas);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd g0 = es.eigenvectors().col(0);
  std::vector<double> fidelity;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    s.duration = t;
    const auto psi = evolve(reg, build_adiabatic_pulse(s));
    Amplitude overlap = 0.0;
    for (std::size_t b = 0; b < psi.dimension(); ++b) overlap += g0(static_cast<Eigen::Index>(b)) * psi.amplitudes()[b];
    fidelity.push_back(std::norm(overlap));
  }
  int inversions = 0;
  for (std::size_t k = 1; k < fidelity.size(); ++k) {
    if (fidelity[k] < fidelity[k - 1]) {
      ++inversions;
      CHECK(fidelity[k - 1] - fidelity[k] <= 0.02);
    }
  }
  CHECK(inversions <= 1);
  CHECK(fidelity.back() > fidelity.front());
}

TEST_CASE("run_qae preconditions") {
  const auto p = line_problem({1.0, 0.5});
  QaeOptions o;
  CHECK_THROWS_AS(run_qae(p, line_register(3, 6.0), o), InvalidArgument);
  o.shots = 0;
  CHECK_THROWS_AS(run_qae(p, line_register(2, 6.0), o), InvalidArgument);
}
