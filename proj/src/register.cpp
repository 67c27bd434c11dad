#include "q3p/register.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "q3p/assignment.hpp"
#include "q3p/error.hpp"

namespace q3p {

double distance(const Point2& a, const Point2& b) noexcept {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double blockade_radius_for(double c6, double omega) noexcept { return std::pow(c6 / omega, 1.0 / 6.0); }

void Register::validate() const {
  if (sites.empty()) throw InvalidArgument("register has no sites");
  if (sites.size() > kMaxRegisterSites) {
    throw InvalidArgument("register has " + std::to_string(sites.size()) + " sites, the limit is " +
                          std::to_string(kMaxRegisterSites));
  }
  if (field_sites.size() != sites.size()) {
    throw InvalidArgument("register field_sites and sites differ in length");
  }
  if (!(c6 > 0.0)) throw InvalidArgument("C6 must be positive");
  if (!(blockade_radius > 0.0)) throw InvalidArgument("blockade radius must be positive");
  if (!(frame.um_per_unit > 0.0)) throw InvalidArgument("grid frame scale must be positive");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (!(distance(sites[i], sites[j]) > 0.0)) {
        throw InvalidArgument("register sites " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide");
      }
    }
  }
}

Register Register::from_sites(std::vector<Point2> sites_um, double c6, double blockade_radius,
                              GridFrame frame) {
  Register reg;
  reg.field_sites.reserve(sites_um.size());
  for (const auto& s : sites_um) reg.field_sites.push_back(frame.to_field(s));
  reg.sites = std::move(sites_um);
  reg.c6 = c6;
  reg.blockade_radius = blockade_radius;
  reg.frame = frame;
  reg.validate();
  return reg;
}

std::vector<std::size_t> BlockadeGraph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < nodes; ++j) {
    if (has_edge(i, j)) out.push_back(j);
  }
  return out;
}

BlockadeGraph BlockadeGraph::from_edges(std::size_t nodes,
                                        std::vector<std::pair<std::size_t, std::size_t>> edges,
                                        std::vector<double> weights) {
  if (nodes > 32) throw InvalidArgument("blockade graphs are limited to 32 nodes");
  if (!weights.empty() && weights.size() != nodes) {
    throw InvalidArgument("node weight count does not match node count");
  }
  BlockadeGraph g;
  g.nodes = nodes;
  g.adjacency.assign(nodes, 0U);
  for (auto& [i, j] : edges) {
    if (i == j) throw InvalidArgument("blockade graph cannot contain self-loops");
    if (i >= nodes || j >= nodes) throw InvalidArgument("edge endpoint out of range");
    if (i > j) std::swap(i, j);
    g.adjacency[i] |= 1U << j;
    g.adjacency[j] |= 1U << i;
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.weights = std::move(weights);
  return g;
}

std::vector<Point2> triangular_lattice(const Point2& lower, const Point2& upper, double spacing) {
  if (!(spacing > 0.0)) throw InvalidArgument("lattice spacing must be positive");
  const double row_step = spacing * std::sqrt(3.0) / 2.0;
  constexpr double kEdgeSlack = 1e-9;
  std::vector<Point2> points;
  for (std::size_t row = 0;; ++row) {
    const double y = lower[1] + static_cast<double>(row) * row_step;
    if (y > upper[1] + kEdgeSlack) break;
    const double shift = (row % 2 == 1) ? spacing / 2.0 : 0.0;
    for (std::size_t col = 0;; ++col) {
      const double x = lower[0] + shift + static_cast<double>(col) * spacing;
      if (x > upper[0] + kEdgeSlack) break;
      points.push_back({x, y});
    }
  }
  return points;
}

std::vector<Point2> triangular_layout(std::size_t rows, std::size_t cols, double spacing) {
  if (rows == 0 || cols == 0) throw InvalidArgument("trap layout needs at least one row and column");
  const double row_step = spacing * std::sqrt(3.0) / 2.0;
  const double x0 = -0.5 * spacing * static_cast<double>(cols - 1);
  const double y0 = -0.5 * row_step * static_cast<double>(rows - 1);
  std::vector<Point2> layout;
  layout.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double shift = (r % 2 == 1) ? spacing / 2.0 : 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      layout.push_back({x0 + shift + spacing * static_cast<double>(c), y0 + row_step * static_cast<double>(r)});
    }
  }
  return layout;
}

Register build_register(const ScalarField& field, const RegisterOptions& options) {
  if (field.dims() != 2) throw InvalidArgument("registers are built from 2D fields");
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw InvalidArgument("threshold must lie in (0, 1)");
  }
  if (!(options.lattice_spacing_um > 0.0)) throw InvalidArgument("lattice spacing must be positive");
  if (!(options.pitch > 0.0)) throw InvalidArgument("candidate pitch must be positive");

  const auto lo = field.geometry().lower();
  const auto hi = field.geometry().upper();
  if (!(field.max_value() > 0.0)) throw InvalidArgument("field has no positive density");
  const double cut = options.threshold * field.max_value();
  std::vector<Point2> kept;
  for (const auto& p : triangular_lattice({lo[0], lo[1]}, {hi[0], hi[1]}, options.pitch)) {
    if (field.interpolate(p) >= cut) kept.push_back(p);
  }
  if (kept.empty()) throw InvalidArgument("threshold selects no register sites");
  if (kept.size() > kMaxRegisterSites) {
    throw InvalidArgument("threshold selects " + std::to_string(kept.size()) +
                          " sites, more than the limit of " + std::to_string(kMaxRegisterSites));
  }

  Register reg;
  reg.frame = GridFrame{{lo[0], lo[1]}, options.lattice_spacing_um / options.pitch};
  reg.c6 = options.c6;
  reg.blockade_radius = blockade_radius_for(options.c6, options.omega_ref);
  reg.field_sites = kept;
  for (const auto& p : kept) reg.sites.push_back(reg.frame.to_um(p));
  reg.validate();
  return reg;
}

namespace {

struct FitCandidate {
  Assignment assignment;
  Point2 translation{};
  double cost = std::numeric_limits<double>::infinity();
};

FitCandidate refine_fit(std::span<const Point2> sites, std::span<const Point2> layout, Point2 t) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  const auto m = static_cast<Eigen::Index>(layout.size());
  Eigen::MatrixXd cost(n, m);
  FitCandidate best;
  std::vector<std::size_t> previous;
  for (int iter = 0; iter < 50; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double dx = sites[i][0] + t[0] - layout[j][0];
        const double dy = sites[i][1] + t[1] - layout[j][1];
        cost(i, j) = dx * dx + dy * dy;
      }
    }
    auto assignment = solve_assignment(cost);
    // Optimal translation for a fixed matching is the mean offset.
    Point2 next{0.0, 0.0};
    for (std::size_t i = 0; i < sites.size(); ++i) {
      next[0] += layout[assignment.column_of_row[i]][0] - sites[i][0];
      next[1] += layout[assignment.column_of_row[i]][1] - sites[i][1];
    }
    next[0] /= static_cast<double>(sites.size());
    next[1] /= static_cast<double>(sites.size());
    double c = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const double dx = sites[i][0] + next[0] - layout[assignment.column_of_row[i]][0];
      const double dy = sites[i][1] + next[1] - layout[assignment.column_of_row[i]][1];
      c += dx * dx + dy * dy;
    }
    const bool converged = assignment.column_of_row == previous;
    previous = assignment.column_of_row;
    if (c < best.cost) best = FitCandidate{std::move(assignment), next, c};
    if (converged) break;
    t = next;
  }
  return best;
}

}  // namespace

TrapFit fit_to_traps(const Register& reg, std::span<const Point2> layout) {
  reg.validate();
  if (layout.size() < reg.size()) {
    throw InvalidArgument("trap layout has " + std::to_string(layout.size()) + " traps for " +
                          std::to_string(reg.size()) + " sites");
  }
  // Starting translations: every site pinned to every trap, then alternate
  // matching and translation updates until the matching is stable.
  FitCandidate best;
  constexpr double kTieTolerance = 1e-12;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    for (const auto& trap : layout) {
      const Point2 start{trap[0] - reg.sites[i][0], trap[1] - reg.sites[i][1]};
      auto cand = refine_fit(reg.sites, layout, start);
      // Equal-cost fits (lattice symmetries) go to the smallest translation.
      const auto shift = [](const FitCandidate& c) { return c.translation[0] * c.translation[0] + c.translation[1] * c.translation[1]; };
      if (cand.cost < best.cost - kTieTolerance ||
          (cand.cost <= best.cost + kTieTolerance && shift(cand) < shift(best) - kTieTolerance)) {
        best = std::move(cand);
      }
    }
  }

  TrapFit fit;
  fit.reg = reg;
  fit.trap_of_site = best.assignment.column_of_row;
  fit.translation = best.translation;
  fit.cost = best.cost;
  for (std::size_t i = 0; i < reg.size(); ++i) fit.reg.sites[i] = layout[fit.trap_of_site[i]];
  fit.reg.validate();
  return fit;
}

BlockadeGraph blockade_graph(std::span<const Point2> sites, double blockade_radius) {
  if (!(blockade_radius > 0.0)) throw InvalidArgument("blockade radius must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (distance(sites[i], sites[j]) <= blockade_radius) edges.emplace_back(i, j);
    }
  }
  return BlockadeGraph::from_edges(sites.size(), std::move(edges));
}

BlockadeGraph blockade_graph(const Register& reg, double blockade_radius) {
  return blockade_graph(reg.sites, blockade_radius);
}

bool lower_indices_first(std::uint32_t a, std::uint32_t b) noexcept {
  const std::uint32_t diff = a ^ b;
  if (diff == 0) return false;
  const std::uint32_t lowest = diff & (~diff + 1U);
  return (a & lowest) != 0;
}

namespace {

struct MisSearch {
  const BlockadeGraph& graph;
  bool weighted;
  std::uint32_t best = 0;
  int best_size = -1;
  double best_weight = 0.0;

  double weight_of(std::uint32_t set) const {
    double w = 0.0;
    for (std::size_t i = 0; i < graph.nodes; ++i) {
      if ((set >> i) & 1U) w += graph.weights[i];
    }
    return w;
  }

  void offer(std::uint32_t set) {
    const int size = std::popcount(set);
    if (size > best_size) {
      best = set;
      best_size = size;
      best_weight = weighted ? weight_of(set) : 0.0;
      return;
    }
    if (size < best_size) return;
    const double w = weighted ? weight_of(set) : 0.0;
    if (w > best_weight || (w == best_weight && lower_indices_first(set, best))) {
      best = set;
      best_weight = w;
    }
  }

  // Include-first DFS visits equal-size sets in lowest-index-first order,
  // so without weights the first set found at the optimum size wins.
  void search(std::size_t next, std::uint32_t chosen, std::uint32_t allowed) {
    const int bound = std::popcount(chosen) + std::popcount(allowed >> next << next);
    if (weighted ? bound < best_size : bound <= best_size) return;
    if (next == graph.nodes) {
      offer(chosen);
      return;
    }
    if ((allowed >> next) & 1U) {
      search(next + 1, chosen | (1U << next), allowed & ~graph.adjacency[next]);
    }
    search(next + 1, chosen, allowed & ~(1U << next));
  }
};

}  // namespace

std::vector<std::size_t> mis_bruteforce(const BlockadeGraph& graph) {
  if (graph.nodes > kMaxRegisterSites) {
    throw InvalidArgument("mis_bruteforce supports at most 25 nodes");
  }
  if (graph.nodes == 0) return {};
  MisSearch s{graph, !graph.weights.empty()};
  const std::uint32_t all = (graph.nodes == 32) ? ~0U : ((1U << graph.nodes) - 1U);
  s.search(0, 0U, all);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < graph.nodes; ++i) {
    if ((s.best >> i) & 1U) out.push_back(i);
  }
  return out;
}

}  // namespace q3p
