#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace q3p {

struct Assignment {
  std::vector<std::size_t> column_of_row;
  double cost = 0.0;
};

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// Hungarian method with potentials, O(rows^2 * cols).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace q3p
