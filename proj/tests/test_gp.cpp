#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "q3p/error.hpp"
#include "q3p/gp.hpp"

using namespace q3p;

TEST_CASE("Matern 5/2 kernel values") {
  CHECK(matern52(0.0, 0.7, 2.0) == 2.0);
  const double s = std::sqrt(5.0);
  CHECK(matern52(0.7, 0.7, 2.0) == doctest::Approx(2.0 * (1.0 + s + 5.0 / 3.0) * std::exp(-s)));
  double previous = matern52(0.0, 1.0, 1.0);
  for (int k = 1; k < 50; ++k) {
    const double v = matern52(0.1 * k, 1.0, 1.0);
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("noise-free GP interpolates its training data") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(10, 2);
  Eigen::VectorXd y(10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y(i) = std::sin(4.0 * x(i, 0)) + x(i, 1) * x(i, 1) + 3.0;
  }
  const GaussianProcess gp(x, y, {0.5, 1.0, 0.0});
  for (Eigen::Index i = 0; i < 10; ++i) {
    const auto p = gp.predict(x.row(i).transpose());
    CHECK(std::abs(p.mean - y(i)) <= 1e-6);
    CHECK(p.variance <= 1e-6);
  }
}

TEST_CASE("GP posterior mean matches the dense formula") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Index n = 12;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < 3; ++d) x(i, d) = u(rng);
    y(i) = 5.0 * u(rng) - 1.0;
  }
  const double noise = 0.01;
  const double l = 0.6;
  const GaussianProcess gp(x, y, {l, 1.0, noise});
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = (x.row(i) - x.row(j)).norm();
      const double s = std::sqrt(5.0) * r / l;
      k(i, j) = (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
  k.diagonal().array() += noise;
  const double ybar = y.mean();
  const Eigen::VectorXd w = k.fullPivLu().solve((y.array() - ybar).matrix());
  for (int q = 0; q < 5; ++q) {
    Eigen::VectorXd z(3);
    for (auto& v : z) v = u(rng);
    double mean = ybar;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = std::sqrt(5.0) * (x.row(i).transpose() - z).norm() / l;
      mean += (1.0 + s + s * s / 3.0) * std::exp(-s) * w(i);
    }
    CHECK(gp.predict(z).mean == doctest::Approx(mean).epsilon(1e-9));
  }
}

TEST_CASE("expected improvement against quadrature") {
  for (const auto& [mean, sd, best] : {std::tuple{0.3, 0.2, 0.25}, {1.0, 0.5, 0.0}, {-1.0, 0.1, 0.0}}) {
    double integral = 0.0;
    const double h = sd * 1e-3;
    for (int i = -12000; i <= 12000; ++i) {
      const double yv = mean + h * i;
      const double density = std::exp(-0.5 * std::pow((yv - mean) / sd, 2)) / (sd * std::sqrt(2.0 * std::numbers::pi));
      integral += std::max(best - yv, 0.0) * density * h;
    }
    CHECK(expected_improvement(mean, sd, best) == doctest::Approx(integral).epsilon(1e-6));
  }
  CHECK(expected_improvement(0.5, 0.0, 1.0) == 0.5);
  CHECK(expected_improvement(1.5, 0.0, 1.0) == 0.0);
}

TEST_CASE("GP minimizer finds the minimum of a parabola") {
  BayesOptions o;
  o.lower = {0.0};
  o.upper = {1.0};
  o.n_calls = 40;
  o.n_random = 5;
  for (std::uint64_t seed : {1, 2, 3}) {
    o.seed = seed;
    const auto r = bayesian_minimize([](const std::vector<double>& x) { return (x[0] - 0.3) * (x[0] - 0.3); }, o);
    CHECK(r.trace.size() == 40);
    CHECK(std::abs(r.best_params[0] - 0.3) <= 0.05);
    CHECK_FALSE(r.failure.has_value());
  }
}

TEST_CASE("dummy minimizer is plain random search") {
  BayesOptions o;
  o.lower = {-1.0, 2.0};
  o.upper = {1.0, 5.0};
  o.n_calls = 15;
  o.n_random = 3;
  o.seed = 8;
  const auto f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1]; };
  o.minimizer = Minimizer::kDummy;
  const auto dummy = bayesian_minimize(f, o);
  o.minimizer = Minimizer::kGp;
  o.n_random = o.n_calls;
  const auto all_random = bayesian_minimize(f, o);
  REQUIRE(dummy.trace.size() == all_random.trace.size());
  for (std::size_t k = 0; k < dummy.trace.size(); ++k) {
    CHECK(dummy.trace[k].params == all_random.trace[k].params);
    for (std::size_t d = 0; d < 2; ++d) {
      CHECK(dummy.trace[k].params[d] >= o.lower[d]);
      CHECK(dummy.trace[k].params[d] <= o.upper[d]);
    }
  }
  double best = dummy.trace[0].value;
  for (const auto& e : dummy.trace) best = std::min(best, e.value);
  CHECK(dummy.best_value == best);
  CHECK(dummy.trace[dummy.best_index].value == best);
}

TEST_CASE("fixed seed reproduces a run exactly") {
  BayesOptions o;
  o.lower = {0.0, 0.0, 0.0};
  o.upper = {1.0, 1.0, 1.0};
  o.n_calls = 8;
  o.n_random = 7;
  o.seed = 99;
  const auto f = [](const std::vector<double>& x) { return std::cos(3.0 * x[0]) + x[1] * x[2]; };
  const auto a = bayesian_minimize(f, o);
  const auto b = bayesian_minimize(f, o);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].params == b.trace[k].params);
    CHECK(a.trace[k].value == b.trace[k].value);
  }
  o.seed = 100;
  CHECK(bayesian_minimize(f, o).trace[0].params != a.trace[0].params);
}

TEST_CASE("objective failure keeps the trace") {
  BayesOptions o;
  o.lower = {0.0};
  o.upper = {1.0};
  o.n_calls = 10;
  o.n_random = 2;
  int calls = 0;
  const auto r = bayesian_minimize(
      [&](const std::vector<double>& x) {
        if (++calls == 5) throw std::runtime_error("device lost");
        return x[0];
      },
      o);
  CHECK(r.trace.size() == 4);
  REQUIRE(r.failure.has_value());
  CHECK(*r.failure == "device lost");
  calls = 0;
  const auto nan = bayesian_minimize([&](const std::vector<double>&) { return ++calls == 3 ? std::nan("") : 1.0; }, o);
  CHECK(nan.trace.size() == 2);
  CHECK(nan.failure.has_value());
}

TEST_CASE("optimizer options are validated") {
  BayesOptions o;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o.lower = {0.0};
  o.upper = {0.0};
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o.upper = {1.0};
  o.n_random = 0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o.n_random = 60;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o.n_random = 10;
  CHECK_NOTHROW(o.validate());
}
