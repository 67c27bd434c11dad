#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "q3p/field.hpp"
#include "q3p/register.hpp"

namespace q3p {

// Occupation n_i of every site; character i of the text form is n_i.
class Bitstring {
 public:
  Bitstring() = default;
  explicit Bitstring(std::vector<std::uint8_t> bits);
  static Bitstring parse(std::string_view text);
  static Bitstring from_mask(std::uint32_t mask, std::size_t length);
  static Bitstring zeros(std::size_t length) { return from_mask(0, length); }

  [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
  [[nodiscard]] bool operator[](std::size_t i) const { return bits_.at(i) != 0; }
  [[nodiscard]] std::size_t popcount() const noexcept;
  [[nodiscard]] std::uint32_t mask() const;
  [[nodiscard]] std::string str() const;
  [[nodiscard]] const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const Bitstring&, const Bitstring&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Sum over i != j counts every pair twice, as in the Ising energy derived from
// the L2 expansion. kUnorderedPairs halves the pair term for comparisons.
enum class PairConvention { kOrderedPairs, kUnorderedPairs };

struct PlacementProblem {
  std::vector<Point2> sites;  // density-grid coordinates
  double variance = 1.0;
  std::vector<double> amplitudes;
  std::vector<double> gamma;
  Eigen::MatrixXd v;  // V_ii holds the self-overlap
  double k_const = 0.0;
  double exclusion_radius = 0.0;
  std::size_t dims = 2;
  PairConvention pairs = PairConvention::kOrderedPairs;
  std::optional<SliceFrame> frame;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const noexcept { return sites.size(); }
  [[nodiscard]] double pair_weight() const noexcept {
    return pairs == PairConvention::kOrderedPairs ? 2.0 : 1.0;
  }
  // Bitmask of the sites closer than or at the exclusion radius to site i.
  [[nodiscard]] std::vector<std::uint32_t> exclusion_masks() const;
  void validate() const;
};

struct Placement {
  std::vector<std::vector<double>> positions;  // 2D field coords, or 3D when lifted
  std::size_t count = 0;
  double cost = 0.0;
  Bitstring bits;
};

// Overlap of two normalized isotropic Gaussians of variance `variance` in
// `dims` dimensions whose centres are `r` apart.
double interaction(double variance, std::size_t dims, double r);

// A_i = g(q_i) * (2 pi sigma^2)^(d/2): the Gaussian at q_i peaks at the local
// density value.
std::vector<double> local_amplitudes(const ScalarField& g, std::span<const Point2> sites,
                                     double variance);

struct CompileOptions {
  double variance = 1.0;
  std::vector<double> amplitudes;  // empty = all ones
  double exclusion_radius = 0.0;
  PairConvention pairs = PairConvention::kOrderedPairs;
};

// Gamma_i = 2 A_i <g, G_i> - A_i^2 <G_i, G_i> by trapezoidal quadrature on g's
// grid; V_ij = A_i A_j * interaction(r_ij); K = <g, g>.
PlacementProblem compile_problem(const ScalarField& g, std::span<const Point2> sites,
                                 const CompileOptions& options);

double cost(const PlacementProblem& problem, const Bitstring& bits);
double cost(const PlacementProblem& problem, std::uint32_t mask);

// Branch and bound over all admissible bitstrings. Ties go to fewer
// excitations, then lowest-index-first.
Placement exact_solve(const PlacementProblem& problem, bool enforce_exclusion);

// Exhaustive 2^M scan with the same ordering rule; reference for tests.
Placement enumerate_solve(const PlacementProblem& problem, bool enforce_exclusion);

// Ordering used by every solver: lower cost, then fewer excitations, then
// lowest-index-first.
bool better_solution(double cost_a, std::uint32_t a, double cost_b, std::uint32_t b) noexcept;

Placement extract_placement(const PlacementProblem& problem, const Bitstring& bits,
                            const std::optional<SliceFrame>& frame);
Placement extract_placement(const PlacementProblem& problem, const Bitstring& bits);

}  // namespace q3p
