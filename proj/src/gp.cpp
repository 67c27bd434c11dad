#include "q3p/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "q3p/error.hpp"
#include "q3p/random.hpp"

namespace q3p {

double matern52(double r, double lengthscale, double signal_variance) noexcept {
  const double s = std::sqrt(5.0) * r / lengthscale;
  return signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

namespace {

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x, double lengthscale, double signal) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = signal;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = matern52((x.row(i) - x.row(j)).norm(), lengthscale, signal);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace

GaussianProcess::GaussianProcess(Eigen::MatrixXd inputs, const Eigen::VectorXd& targets,
                                 Hyperparameters hyper)
    : inputs_(std::move(inputs)), hyper_(hyper) {
  const Eigen::Index n = inputs_.rows();
  if (n == 0 || targets.size() != n) throw InvalidArgument("GP needs matching, non-empty inputs and targets");
  if (!(hyper_.lengthscale > 0.0) || !(hyper_.signal_variance > 0.0) || !(hyper_.noise_variance >= 0.0)) {
    throw InvalidArgument("invalid GP hyperparameters");
  }
  y_mean_ = targets.mean();
  const double var = (targets.array() - y_mean_).square().sum() / static_cast<double>(n);
  y_scale_ = var > 1e-300 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd y = (targets.array() - y_mean_) / y_scale_;

  Eigen::MatrixXd k = covariance(inputs_, hyper_.lengthscale, hyper_.signal_variance);
  // A floor keeps the factorization stable when points nearly coincide.
  const double jitter = std::max(hyper_.noise_variance, 1e-12 * hyper_.signal_variance);
  k.diagonal().array() += jitter;
  chol_.compute(k);
  if (chol_.info() != Eigen::Success) throw Error("GP covariance is not positive definite");
  alpha_ = chol_.solve(y);
  const Eigen::MatrixXd l = chol_.matrixL();
  lml_ = -0.5 * y.dot(alpha_) - l.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

GaussianProcess GaussianProcess::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
  const double scale = std::sqrt(static_cast<double>(std::max<Eigen::Index>(inputs.cols(), 1)));
  static constexpr double kLengths[] = {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  static constexpr double kNoises[] = {1e-6, 1e-3, 1e-2, 1e-1, 0.3};
  std::optional<GaussianProcess> best;
  for (double l : kLengths) {
    for (double noise : kNoises) {
      try {
        GaussianProcess gp(inputs, targets, {l * scale, 1.0, noise});
        if (!best || gp.log_marginal_likelihood() > best->log_marginal_likelihood()) best = std::move(gp);
      } catch (const Error&) {
        // skip ill-conditioned combinations
      }
    }
  }
  if (!best) throw Error("GP fit failed for every hyperparameter setting");
  return std::move(*best);
}

GaussianProcess::Prediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
  if (x.size() != inputs_.cols()) throw InvalidArgument("GP query has the wrong dimension");
  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ks(i) = matern52((inputs_.row(i).transpose() - x).norm(), hyper_.lengthscale, hyper_.signal_variance);
  }
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var = std::max(hyper_.signal_variance - v.squaredNorm(), 0.0);
  return {y_mean_ + y_scale_ * mean, var * y_scale_ * y_scale_};
}

double expected_improvement(double mean, double sd, double best, double xi) noexcept {
  const double gain = best - mean - xi;
  if (!(sd > 0.0)) return std::max(gain, 0.0);
  const double z = gain / sd;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return gain * cdf + sd * pdf;
}

void BayesOptions::validate() const {
  if (lower.empty() || lower.size() != upper.size()) throw InvalidArgument("search bounds must be non-empty and matched");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw InvalidArgument("search bound lower must be below upper");
  }
  if (n_calls == 0) throw InvalidArgument("n_calls must be positive");
  if (n_random == 0 || n_random > n_calls) throw InvalidArgument("n_random must be in [1, n_calls]");
  if (candidates == 0) throw InvalidArgument("candidates must be positive");
}

namespace {

std::vector<double> denormalize(const Eigen::VectorXd& u, const BayesOptions& o) {
  std::vector<double> p(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) p[i] = o.lower[i] + u(i) * (o.upper[i] - o.lower[i]);
  return p;
}

Eigen::VectorXd uniform_point(Rng& rng, std::size_t dims) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dims));
  for (auto& v : x) v = u(rng);
  return x;
}

Eigen::VectorXd propose(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t incumbent,
                        const BayesOptions& o, Rng& rng) {
  const auto gp = GaussianProcess::fit(x, y);
  const double best = y.minCoeff();
  const std::size_t dims = o.lower.size();
  std::normal_distribution<double> step(0.0, 1.0);
  Eigen::VectorXd chosen;
  double chosen_ei = -1.0;
  const auto consider = [&](const Eigen::VectorXd& c) {
    const auto p = gp.predict(c);
    const double ei = expected_improvement(p.mean, std::sqrt(p.variance), best);
    if (ei > chosen_ei) {
      chosen_ei = ei;
      chosen = c;
    }
  };
  for (std::size_t c = 0; c < o.candidates; ++c) consider(uniform_point(rng, dims));
  const Eigen::VectorXd centre = x.row(static_cast<Eigen::Index>(incumbent)).transpose();
  for (std::size_t c = 0; c < o.local_candidates; ++c) {
    const double width = c % 2 == 0 ? 0.05 : 0.15;
    Eigen::VectorXd p = centre;
    for (auto& v : p) v = std::clamp(v + width * step(rng), 0.0, 1.0);
    consider(p);
  }
  return chosen;
}

}  // namespace

BayesResult bayesian_minimize(const Objective& objective, const BayesOptions& options) {
  options.validate();
  const std::size_t dims = options.lower.size();
  BayesResult result;
  Eigen::MatrixXd x(0, static_cast<Eigen::Index>(dims));
  std::vector<double> values;
  for (std::size_t k = 0; k < options.n_calls; ++k) {
    Rng rng = make_rng(options.seed, Stream::kOptimizer, k);
    Eigen::VectorXd u;
    if (k < options.n_random || options.minimizer == Minimizer::kDummy) {
      u = uniform_point(rng, dims);
    } else {
      const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
      u = propose(x, y, result.best_index, options, rng);
    }
    auto params = denormalize(u, options);
    double value = 0.0;
    try {
      value = objective(params);
    } catch (const std::exception& e) {
      result.failure = e.what();
      break;
    }
    if (!std::isfinite(value)) {
      result.failure = "objective returned a non-finite value";
      break;
    }
    x.conservativeResize(x.rows() + 1, Eigen::NoChange);
    x.row(x.rows() - 1) = u.transpose();
    values.push_back(value);
    if (result.trace.empty() || value < result.best_value) {
      result.best_value = value;
      result.best_index = result.trace.size();
      result.best_params = params;
    }
    result.trace.push_back({std::move(params), value});
  }
  return result;
}

}  // namespace q3p
