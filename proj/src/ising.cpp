#include "q3p/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "q3p/error.hpp"

namespace q3p {

Bitstring::Bitstring(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw InvalidArgument("bitstring entries must be 0 or 1");
  }
}

Bitstring Bitstring::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw InvalidArgument("bitstring may only contain 0 and 1");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Bitstring(std::move(bits));
}

Bitstring Bitstring::from_mask(std::uint32_t mask, std::size_t length) {
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
  return Bitstring(std::move(bits));
}

std::size_t Bitstring::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint32_t Bitstring::mask() const {
  if (bits_.size() > 32) throw InvalidArgument("bitstring too long for a 32-bit mask");
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) m |= static_cast<std::uint32_t>(bits_[i]) << i;
  return m;
}

std::string Bitstring::str() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

std::vector<std::uint32_t> PlacementProblem::exclusion_masks() const {
  std::vector<std::uint32_t> masks(size(), 0U);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      if (i != j && distance(sites[i], sites[j]) <= exclusion_radius) masks[i] |= 1U << j;
    }
  }
  return masks;
}

void PlacementProblem::validate() const {
  const auto m = size();
  if (m == 0) throw InvalidArgument("placement problem has no sites");
  if (m > kMaxRegisterSites) throw InvalidArgument("placement problem has more than 25 sites");
  if (gamma.size() != m || amplitudes.size() != m) {
    throw InvalidArgument("gamma/amplitude length does not match the site count");
  }
  if (v.rows() != static_cast<Eigen::Index>(m) || v.cols() != static_cast<Eigen::Index>(m)) {
    throw InvalidArgument("interaction matrix has the wrong shape");
  }
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  if (exclusion_radius < 0.0) throw InvalidArgument("exclusion radius must be non-negative");
}

double interaction(double variance, std::size_t dims, double r) {
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  if (r < 0.0) throw InvalidArgument("separation must be non-negative");
  const double d = static_cast<double>(dims);
  return std::pow(4.0 * std::numbers::pi * variance, -0.5 * d) * std::exp(-r * r / (4.0 * variance));
}

std::vector<double> local_amplitudes(const ScalarField& g, std::span<const Point2> sites,
                                     double variance) {
  const double peak_scale = std::pow(2.0 * std::numbers::pi * variance, 0.5 * static_cast<double>(g.dims()));
  std::vector<double> out;
  out.reserve(sites.size());
  for (const auto& s : sites) out.push_back(std::max(0.0, g.interpolate(s)) * peak_scale);
  return out;
}

PlacementProblem compile_problem(const ScalarField& g, std::span<const Point2> sites,
                                 const CompileOptions& options) {
  if (g.dims() != 2) throw InvalidArgument("placement problems are compiled on 2D densities");
  if (!(options.variance > 0.0)) throw InvalidArgument("variance must be positive");
  if (sites.empty()) throw InvalidArgument("no sites to compile");
  if (!options.amplitudes.empty() && options.amplitudes.size() != sites.size()) {
    throw InvalidArgument("amplitude count does not match site count");
  }
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!g.contains(sites[i])) {
      throw InvalidArgument("site " + std::to_string(i) + " lies outside the density grid");
    }
  }

  PlacementProblem p;
  p.sites.assign(sites.begin(), sites.end());
  p.variance = options.variance;
  p.amplitudes = options.amplitudes.empty() ? std::vector<double>(sites.size(), 1.0) : options.amplitudes;
  for (double a : p.amplitudes) {
    if (a < 0.0 || !std::isfinite(a)) throw InvalidArgument("amplitudes must be non-negative");
  }
  p.exclusion_radius = options.exclusion_radius;
  p.dims = g.dims();
  p.pairs = options.pairs;
  p.frame = g.frame();

  const auto weights = trapezoid_weights(g.geometry());
  const auto values = g.values();
  std::vector<std::vector<double>> positions(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) positions[f] = g.position(f);

  p.k_const = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) p.k_const += weights[f] * values[f] * values[f];

  const std::size_t m = sites.size();
  p.gamma.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double> center{sites[i][0], sites[i][1]};
    double cross = 0.0, self = 0.0, mass = 0.0;
    for (std::size_t f = 0; f < g.size(); ++f) {
      const double gi = gaussian_density(center, p.variance, 1.0, positions[f]);
      cross += weights[f] * values[f] * gi;
      self += weights[f] * gi * gi;
      mass += weights[f] * gi;
    }
    const double a = p.amplitudes[i];
    p.gamma[i] = 2.0 * a * cross - a * a * self;
    if (mass < 0.99) {
      p.warnings.push_back("site " + std::to_string(i) + ": grid holds only " +
                           std::to_string(100.0 * mass) + "% of the Gaussian mass");
    }
  }

  p.v.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double r = (i == j) ? 0.0 : distance(sites[i], sites[j]);
      p.v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          p.amplitudes[i] * p.amplitudes[j] * interaction(p.variance, p.dims, r);
    }
  }
  return p;
}

double cost(const PlacementProblem& problem, std::uint32_t mask) {
  const std::size_t m = problem.size();
  double linear = 0.0;
  double pair = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!((mask >> i) & 1U)) continue;
    linear -= problem.gamma[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      if ((mask >> j) & 1U) pair += problem.v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return linear + problem.pair_weight() * pair;
}

double cost(const PlacementProblem& problem, const Bitstring& bits) {
  if (bits.size() != problem.size()) {
    throw InvalidArgument("bitstring length " + std::to_string(bits.size()) + " does not match " +
                          std::to_string(problem.size()) + " sites");
  }
  return cost(problem, bits.mask());
}

bool better_solution(double cost_a, std::uint32_t a, double cost_b, std::uint32_t b) noexcept {
  if (cost_a != cost_b) return cost_a < cost_b;
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  return lower_indices_first(a, b);
}

namespace {

bool admissible(std::uint32_t mask, const std::vector<std::uint32_t>& excl) {
  for (std::size_t i = 0; i < excl.size(); ++i) {
    if (((mask >> i) & 1U) && (mask & excl[i])) return false;
  }
  return true;
}

struct BranchAndBound {
  const PlacementProblem& p;
  std::vector<std::uint32_t> excl;
  std::vector<double> negative_pairs;  // sum over later partners of min(0, w V)
  double w;
  std::uint32_t best_mask = 0;
  double best_cost = 0.0;  // empty placement is always admissible

  void search(std::size_t next, std::uint32_t chosen, std::uint32_t blocked, double partial) {
    const std::size_t m = p.size();
    if (next == m) {
      const double c = cost(p, chosen);
      if (better_solution(c, chosen, best_cost, best_mask)) {
        best_cost = c;
        best_mask = chosen;
      }
      return;
    }
    // Lower bound: every remaining site contributes at best its most
    // favourable marginal given the current selection.
    double bound = partial;
    for (std::size_t r = next; r < m; ++r) {
      if ((blocked >> r) & 1U) continue;
      double marginal = -p.gamma[r];
      for (std::size_t j = 0; j < next; ++j) {
        if ((chosen >> j) & 1U) marginal += w * p.v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      }
      bound += std::min(0.0, marginal) + negative_pairs[r];
    }
    const double slack = 1e-9 * (1.0 + std::abs(best_cost));
    if (bound > best_cost + slack) return;

    if (!((blocked >> next) & 1U)) {
      double marginal = -p.gamma[next];
      for (std::size_t j = 0; j < next; ++j) {
        if ((chosen >> j) & 1U) {
          marginal += w * p.v(static_cast<Eigen::Index>(next), static_cast<Eigen::Index>(j));
        }
      }
      search(next + 1, chosen | (1U << next), blocked | excl[next], partial + marginal);
    }
    search(next + 1, chosen, blocked, partial);
  }
};

}  // namespace

Placement exact_solve(const PlacementProblem& problem, bool enforce_exclusion) {
  problem.validate();
  const std::size_t m = problem.size();
  BranchAndBound bb{problem, {}, std::vector<double>(m, 0.0), problem.pair_weight()};
  bb.excl = enforce_exclusion ? problem.exclusion_masks() : std::vector<std::uint32_t>(m, 0U);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = r + 1; s < m; ++s) {
      bb.negative_pairs[r] += std::min(0.0, bb.w * problem.v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)));
    }
  }
  bb.search(0, 0U, 0U, 0.0);
  return extract_placement(problem, Bitstring::from_mask(bb.best_mask, m));
}

Placement enumerate_solve(const PlacementProblem& problem, bool enforce_exclusion) {
  problem.validate();
  const std::size_t m = problem.size();
  const auto excl = enforce_exclusion ? problem.exclusion_masks() : std::vector<std::uint32_t>(m, 0U);
  std::uint32_t best = 0;
  double best_cost = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    const auto m32 = static_cast<std::uint32_t>(mask);
    if (!admissible(m32, excl)) continue;
    const double c = cost(problem, m32);
    if (better_solution(c, m32, best_cost, best)) {
      best = m32;
      best_cost = c;
    }
  }
  return extract_placement(problem, Bitstring::from_mask(best, m));
}

Placement extract_placement(const PlacementProblem& problem, const Bitstring& bits,
                            const std::optional<SliceFrame>& frame) {
  Placement out;
  out.cost = cost(problem, bits);
  out.bits = bits;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const auto& q = problem.sites[i];
    if (frame) {
      const Vec3 p = frame->lift(q[0], q[1]);
      out.positions.push_back({p[0], p[1], p[2]});
    } else {
      out.positions.push_back({q[0], q[1]});
    }
  }
  out.count = out.positions.size();
  return out;
}

Placement extract_placement(const PlacementProblem& problem, const Bitstring& bits) {
  return extract_placement(problem, bits, problem.frame);
}

}  // namespace q3p
