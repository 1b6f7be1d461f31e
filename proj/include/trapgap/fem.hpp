#pragma once

// Piecewise-linear finite elements on the slit cell and a shift-invert
// subspace eigensolver for the lowest eigenpairs of K u = lambda M u.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "trapgap/mesh.hpp"

namespace trapgap {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryCondition { Neumann, Dirichlet, Periodic, Antiperiodic };

std::string_view to_string(BoundaryCondition bc);

/// Unreduced stiffness and consistent mass matrices, one row per mesh node.
struct RawSystem {
  SparseMatrix K;
  SparseMatrix M;
  /// Nodes lying on dY.
  std::vector<bool> on_boundary;
  std::array<std::vector<NodePair>, 2> periodic_pairs;
  std::array<std::size_t, 4> corners{};
};

/// Node -> reduced unknown; eliminated nodes carry dof = -1.  A node value
/// equals factor * (value of its dof).
struct DofMap {
  std::vector<long> dof;
  std::vector<double> factor;
  std::size_t count = 0;
};

struct AssembledSystem {
  SparseMatrix K;
  SparseMatrix M;
  DofMap dof_map;
  BoundaryCondition variant = BoundaryCondition::Neumann;

  std::size_t size() const { return static_cast<std::size_t>(K.rows()); }
  /// Nodal values of a reduced vector.
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
};

struct EigenResult {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;
  int iterations = 0;
};

/// Element matrices of a linear triangle; exposed for tests.
struct ElementMatrices {
  Eigen::Matrix3d stiffness;
  Eigen::Matrix3d mass;
};
ElementMatrices element_matrices(const Point2& a, const Point2& b, const Point2& c);

/// Throws DegenerateTriangle(index) when a triangle area is below 1e-14.
RawSystem assemble(const Mesh& mesh);

/// Neumann keeps every node; Dirichlet drops dY nodes; Periodic and
/// Antiperiodic merge each pair into one unknown with factor +1 / -1 per
/// axis crossing (all four corners share one unknown).
AssembledSystem apply_bc(const RawSystem& raw, BoundaryCondition variant);

struct SolverOptions {
  double tol = 1e-9;
  int max_iterations = 5000;
};

/// k smallest eigenpairs, each with normwise backward error
///   |K u - lambda M u| / ((|K| + |lambda| |M|) |u|) <= tol
/// (row-sum matrix norms).  Returned vectors are M-orthonormal.
EigenResult solve_lowest(const AssembledSystem& system, std::size_t k,
                         const SolverOptions& options = {});

/// CSV rows "index,variant,lambda,residual" (no header line).
std::string eigen_csv_rows(const EigenResult& result, BoundaryCondition variant);

}  // namespace trapgap
