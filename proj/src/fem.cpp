#include "trapgap/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include "trapgap/error.hpp"
#include "trapgap/serialization.hpp"

namespace trapgap {

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Periodic: return "periodic";
    case BoundaryCondition::Antiperiodic: return "antiperiodic";
  }
  return "unknown";
}

ElementMatrices element_matrices(const Point2& a, const Point2& b, const Point2& c) {
  const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  const Eigen::Vector3d gx(b.y - c.y, c.y - a.y, a.y - b.y);
  const Eigen::Vector3d gy(c.x - b.x, a.x - c.x, b.x - a.x);
  ElementMatrices e;
  e.stiffness = (gx * gx.transpose() + gy * gy.transpose()) / (4.0 * area);
  e.mass = Eigen::Matrix3d::Constant(area / 12.0);
  e.mass.diagonal().setConstant(area / 6.0);
  return e;
}

RawSystem assemble(const Mesh& mesh) {
  const auto nn = static_cast<Eigen::Index>(mesh.nodes.size());
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point2& a = mesh.nodes[tri[0]];
    const Point2& b = mesh.nodes[tri[1]];
    const Point2& c = mesh.nodes[tri[2]];
    const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
    if (!(area >= 1e-14))
      throw Error(ErrorCode::DegenerateTriangle, "area " + format_real(area), t);
    const ElementMatrices e = element_matrices(a, b, c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tri[i], tri[j], e.stiffness(i, j));
        mt.emplace_back(tri[i], tri[j], e.mass(i, j));
      }
  }
  RawSystem raw;
  raw.K.resize(nn, nn);
  raw.M.resize(nn, nn);
  raw.K.setFromTriplets(kt.begin(), kt.end());
  raw.M.setFromTriplets(mt.begin(), mt.end());
  raw.on_boundary.resize(mesh.nodes.size());
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    const Point2& p = mesh.nodes[v];
    raw.on_boundary[v] = p.x == -0.5 || p.x == 0.5 || p.y == -0.5 || p.y == 0.5;
  }
  raw.periodic_pairs = mesh.periodic_pairs;
  raw.corners = mesh.corners;
  return raw;
}

Eigen::VectorXd AssembledSystem::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_map.dof.size()));
  for (std::size_t v = 0; v < dof_map.dof.size(); ++v)
    if (dof_map.dof[v] >= 0) out[v] = dof_map.factor[v] * reduced[dof_map.dof[v]];
  return out;
}

namespace {

DofMap quasi_periodic_map(const RawSystem& raw, double theta) {
  const std::size_t nn = raw.on_boundary.size();
  if (raw.periodic_pairs[0].empty() || raw.periodic_pairs[1].empty())
    throw Error(ErrorCode::MissingPeriodicPairs, "mesh carries no periodic pairs");
  // parent[v] = (node on the opposite low face, factor); first axis wins.
  std::vector<long> parent(nn, -1);
  std::vector<double> link(nn, 1.0);
  for (int axis = 0; axis < 2; ++axis)
    for (const auto& [lo, hi] : raw.periodic_pairs[axis]) {
      if (lo >= nn || hi >= nn)
        throw Error(ErrorCode::MissingPeriodicPairs, "periodic pair out of range");
      if (parent[hi] == -1 && hi != lo) {
        parent[hi] = static_cast<long>(lo);
        link[hi] = theta;
      }
    }
  DofMap map;
  map.dof.assign(nn, -1);
  map.factor.assign(nn, 1.0);
  for (std::size_t v = 0; v < nn; ++v)
    if (parent[v] == -1) map.dof[v] = static_cast<long>(map.count++);
  for (std::size_t v = 0; v < nn; ++v) {
    std::size_t u = v;
    double f = 1.0;
    for (int hops = 0; parent[u] != -1; ++hops) {
      if (hops > 4)
        throw Error(ErrorCode::MissingPeriodicPairs, "periodic pairs form a cycle", v);
      f *= link[u];
      u = static_cast<std::size_t>(parent[u]);
    }
    map.dof[v] = map.dof[u];
    map.factor[v] = f;
  }
  return map;
}

}  // namespace

AssembledSystem apply_bc(const RawSystem& raw, BoundaryCondition variant) {
  const std::size_t nn = raw.on_boundary.size();
  DofMap map;
  switch (variant) {
    case BoundaryCondition::Neumann:
      map.dof.resize(nn);
      map.factor.assign(nn, 1.0);
      for (std::size_t v = 0; v < nn; ++v) map.dof[v] = static_cast<long>(v);
      map.count = nn;
      break;
    case BoundaryCondition::Dirichlet:
      map.dof.assign(nn, -1);
      map.factor.assign(nn, 1.0);
      for (std::size_t v = 0; v < nn; ++v)
        if (!raw.on_boundary[v]) map.dof[v] = static_cast<long>(map.count++);
      break;
    case BoundaryCondition::Periodic:
      map = quasi_periodic_map(raw, 1.0);
      break;
    case BoundaryCondition::Antiperiodic:
      map = quasi_periodic_map(raw, -1.0);
      break;
  }

  std::vector<Eigen::Triplet<double>> pt;
  for (std::size_t v = 0; v < nn; ++v)
    if (map.dof[v] >= 0) pt.emplace_back(v, map.dof[v], map.factor[v]);
  SparseMatrix P(static_cast<Eigen::Index>(nn), static_cast<Eigen::Index>(map.count));
  P.setFromTriplets(pt.begin(), pt.end());

  AssembledSystem sys;
  sys.variant = variant;
  sys.K = SparseMatrix(P.transpose() * raw.K * P);
  sys.M = SparseMatrix(P.transpose() * raw.M * P);
  sys.K.prune(0.0);
  sys.M.prune(0.0);
  sys.dof_map = std::move(map);
  return sys;
}

namespace {

struct Residuals {
  std::vector<double> values;
  double worst = 0.0;
};

double row_sum_norm(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (Eigen::Index c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

// Normwise backward error ||Kx - lam Mx|| / ((||K|| + |lam| ||M||) ||x||).
Residuals residuals(const SparseMatrix& K, const SparseMatrix& M, const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& lambda, std::size_t k) {
  const double nk = row_sum_norm(K), nm = row_sum_norm(M);
  const Eigen::MatrixXd KX = K * X.leftCols(static_cast<Eigen::Index>(k));
  const Eigen::MatrixXd MX = M * X.leftCols(static_cast<Eigen::Index>(k));
  Residuals r;
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double num = (KX.col(c) - lambda[c] * MX.col(c)).norm();
    const double den = (nk + std::abs(lambda[c]) * nm) * X.col(c).norm();
    r.values.push_back(num / den);
    r.worst = std::max(r.worst, r.values.back());
  }
  return r;
}

EigenResult dense_solve(const AssembledSystem& sys, std::size_t k) {
  const Eigen::MatrixXd K(sys.K), M(sys.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "dense generalized eigensolve failed");
  EigenResult out;
  const auto kk = static_cast<Eigen::Index>(k);
  out.vectors = es.eigenvectors().leftCols(kk);
  const Eigen::VectorXd lam = es.eigenvalues().head(kk);
  out.values.assign(lam.data(), lam.data() + kk);
  out.residuals = residuals(sys.K, sys.M, out.vectors, lam, k).values;
  return out;
}

}  // namespace

EigenResult solve_lowest(const AssembledSystem& system, std::size_t k,
                         const SolverOptions& options) {
  const std::size_t n = system.size();
  if (k == 0 || k > n)
    throw Error(ErrorCode::InvalidArgument,
                "requested " + std::to_string(k) + " eigenpairs of a system of size " +
                    std::to_string(n));
  if (!(options.tol >= 1e-12))
    throw Error(ErrorCode::InvalidArgument, "tolerance must be at least 1e-12");

  const double shift = -1e-6 * system.K.diagonal().sum() / system.M.diagonal().sum();
  if (n <= 200) {
    EigenResult out = dense_solve(system, k);
    const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
    if (worst > options.tol)
      throw Error(ErrorCode::ConvergenceFailure,
                  "dense residual " + format_real(worst) + " above tolerance");
    return out;
  }

  const SparseMatrix shifted = system.K - shift * system.M;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> factor(shifted);
  if (factor.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "factorization of K - sM failed");

  const std::size_t block = std::min(n, std::max<std::size_t>(k + 2, 8));
  const auto nb = static_cast<Eigen::Index>(block);
  const auto dim = static_cast<Eigen::Index>(n);

  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd X(dim, nb);
  for (Eigen::Index j = 0; j < nb; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) X(i, j) = uni(rng);

  Eigen::VectorXd theta;
  double best = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::MatrixXd Y = factor.solve(system.M * X);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Y = qr.householderQ() * Eigen::MatrixXd::Identity(dim, nb);

    const Eigen::MatrixXd Kp = Y.transpose() * (system.K * Y);
    const Eigen::MatrixXd Mp = Y.transpose() * (system.M * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(
        0.5 * (Kp + Kp.transpose()), 0.5 * (Mp + Mp.transpose()));
    if (rr.info() != Eigen::Success)
      throw Error(ErrorCode::ConvergenceFailure, "Rayleigh-Ritz step failed");
    theta = rr.eigenvalues();
    X = Y * rr.eigenvectors();

    const Residuals res = residuals(system.K, system.M, X, theta, k);
    best = std::min(best, res.worst);
    if (res.worst <= options.tol) {
      EigenResult out;
      out.values.assign(theta.data(), theta.data() + k);
      out.vectors = X.leftCols(static_cast<Eigen::Index>(k));
      out.residuals = res.values;
      out.iterations = iter;
      return out;
    }
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "no convergence after " + std::to_string(options.max_iterations) +
                  " iterations, best residual " + format_real(best));
}

std::string eigen_csv_rows(const EigenResult& result, BoundaryCondition variant) {
  std::ostringstream os;
  for (std::size_t i = 0; i < result.values.size(); ++i)
    os << i + 1 << "," << to_string(variant) << "," << format_real(result.values[i]) << ","
       << format_real(result.residuals[i]) << "\n";
  return os.str();
}

}  // namespace trapgap
