#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace q3p {

// Matern-5/2 covariance with a single length scale.
double matern52(double r, double lengthscale, double signal_variance) noexcept;

// Zero-mean GP regression on standardized targets.
class GaussianProcess {
 public:
  struct Hyperparameters {
    double lengthscale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 1e-6;  // relative to the standardized target variance
  };
  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  GaussianProcess(Eigen::MatrixXd inputs, const Eigen::VectorXd& targets, Hyperparameters hyper);

  // Picks length scale and noise level from a fixed grid by maximizing the
  // log marginal likelihood.
  static GaussianProcess fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);

  [[nodiscard]] Prediction predict(const Eigen::VectorXd& x) const;
  [[nodiscard]] double log_marginal_likelihood() const noexcept { return lml_; }
  [[nodiscard]] const Hyperparameters& hyperparameters() const noexcept { return hyper_; }

 private:
  Eigen::MatrixXd inputs_;  // one row per observation
  Hyperparameters hyper_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};

// Expected improvement below `best` for a Gaussian predictive distribution.
double expected_improvement(double mean, double sd, double best, double xi = 0.0) noexcept;

enum class Minimizer { kDummy, kGp };

struct BayesOptions {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t n_calls = 50;   // n_c
  std::size_t n_random = 10;  // n_r
  Minimizer minimizer = Minimizer::kGp;
  std::uint64_t seed = 0;
  std::size_t candidates = 1024;
  std::size_t local_candidates = 256;

  void validate() const;
};

struct Evaluation {
  std::vector<double> params;
  double value = 0.0;
};

struct BayesResult {
  std::vector<double> best_params;
  double best_value = 0.0;
  std::size_t best_index = 0;
  std::vector<Evaluation> trace;
  std::optional<std::string> failure;  // set when the objective threw
};

using Objective = std::function<double(const std::vector<double>&)>;

// n_random uniform draws, then GP + expected-improvement proposals (or more
// uniform draws for the dummy minimizer) until n_calls evaluations are
// recorded. Returns the best recorded point.
BayesResult bayesian_minimize(const Objective& objective, const BayesOptions& options);

}  // namespace q3p
