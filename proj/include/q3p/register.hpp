#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "q3p/field.hpp"
#include "q3p/units.hpp"

namespace q3p {

using Point2 = std::array<double, 2>;

inline constexpr std::size_t kMaxRegisterSites = 25;

double distance(const Point2& a, const Point2& b) noexcept;

// Blockade radius from the resonance condition C6 / r^6 = Omega.
double blockade_radius_for(double c6, double omega) noexcept;

// Affine map between density-grid coordinates and register micrometres:
// um = (field - origin) * um_per_unit.
struct GridFrame {
  Point2 origin{0.0, 0.0};
  double um_per_unit = 1.0;

  [[nodiscard]] Point2 to_um(const Point2& p) const noexcept {
    return {(p[0] - origin[0]) * um_per_unit, (p[1] - origin[1]) * um_per_unit};
  }
  [[nodiscard]] Point2 to_field(const Point2& q) const noexcept {
    return {q[0] / um_per_unit + origin[0], q[1] / um_per_unit + origin[1]};
  }
};

// Atom positions in um plus the density-grid point each atom stands for.
// field_sites[i] is where site i's Gaussian is centred in the placement
// problem; it survives trap fitting, which only moves the physical sites.
struct Register {
  std::vector<Point2> sites;
  std::vector<Point2> field_sites;
  double c6 = units::kDefaultC6;
  double blockade_radius = blockade_radius_for(units::kDefaultC6, units::kDefaultOmegaMax);
  GridFrame frame;

  [[nodiscard]] std::size_t size() const noexcept { return sites.size(); }
  // Throws unless 1 <= size <= 25, sites are pairwise distinct and
  // field_sites matches in length.
  void validate() const;
  // Register whose field_sites are the sites mapped back through `frame`.
  static Register from_sites(std::vector<Point2> sites_um, double c6, double blockade_radius,
                             GridFrame frame = {});
};

struct BlockadeGraph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j
  std::vector<double> weights;                             // empty = unweighted
  std::vector<std::uint32_t> adjacency;                    // bitmask per node

  [[nodiscard]] bool has_edge(std::size_t i, std::size_t j) const noexcept {
    return (adjacency[i] >> j) & 1U;
  }
  [[nodiscard]] std::vector<std::size_t> neighbors(std::size_t i) const;

  static BlockadeGraph from_edges(std::size_t nodes,
                                  std::vector<std::pair<std::size_t, std::size_t>> edges,
                                  std::vector<double> weights = {});
};

struct RegisterOptions {
  double threshold = 0.5;  // fraction of the field maximum
  double lattice_spacing_um = units::kDefaultLatticeSpacing;
  double pitch = 1.0;  // candidate-lattice spacing in field length units
  double c6 = units::kDefaultC6;
  double omega_ref = units::kDefaultOmegaMax;
};

// Triangular lattice with nearest-neighbour distance `spacing`, rows along x,
// odd rows shifted by spacing/2. Points are ordered row by row.
std::vector<Point2> triangular_lattice(const Point2& lower, const Point2& upper, double spacing);

// Trap layout of `rows` x `cols` triangular-lattice sites centred on the
// origin.
std::vector<Point2> triangular_layout(std::size_t rows, std::size_t cols, double spacing);

// Keeps the candidate traps whose interpolated density reaches
// threshold * max(field) and rescales them to lattice_spacing_um.
Register build_register(const ScalarField& field, const RegisterOptions& options);

struct TrapFit {
  Register reg;
  std::vector<std::size_t> trap_of_site;
  Point2 translation{0.0, 0.0};
  double cost = 0.0;  // sum of squared displacements after translation, um^2
};

// Moves every site onto a distinct trap, minimizing the squared displacement
// from the translated input register.
TrapFit fit_to_traps(const Register& reg, std::span<const Point2> layout);

BlockadeGraph blockade_graph(const Register& reg, double blockade_radius);
BlockadeGraph blockade_graph(std::span<const Point2> sites, double blockade_radius);

// Preference between two node sets of equal size: true when `a` comes first
// in lowest-index-first order (its sorted index list is lexicographically
// smaller).
bool lower_indices_first(std::uint32_t a, std::uint32_t b) noexcept;

// Maximum-cardinality independent set; ties go to the larger total weight,
// then lower_indices_first. Returned as ascending node indices.
std::vector<std::size_t> mis_bruteforce(const BlockadeGraph& graph);

}  // namespace q3p
