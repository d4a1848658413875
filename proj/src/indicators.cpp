#include "vemc/indicators.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "vemc/error.hpp"

namespace vemc {

namespace {

// Rows [1, (x-c)/s, (y-c)/s] for the given points; c is their mean, s their
// spread. Returns false when the points are (numerically) collinear.
struct LinearBasis {
  Vec2 center = Vec2::Zero();
  double scale = 1.0;
  Eigen::MatrixXd A;

  Eigen::RowVector3d row(const Vec2& x) const {
    return {1.0, (x.x() - center.x()) / scale, (x.y() - center.y()) / scale};
  }
};

LinearBasis make_basis(const std::vector<Vec2>& pts) {
  LinearBasis b;
  for (const auto& p : pts) b.center += p;
  b.center /= static_cast<double>(pts.size());
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, (p - b.center).norm());
  b.scale = s > 0.0 ? s : 1.0;
  b.A.resize(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) b.A.row(static_cast<Eigen::Index>(i)) = b.row(pts[i]);
  return b;
}

bool well_posed(const Eigen::MatrixXd& A) {
  if (A.rows() < 3) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  return s(2) >= 1e-8 * s(0);
}

}  // namespace

Vec2 PlaneFit::operator()(const Vec2& x) const {
  const Eigen::RowVector3d p(1.0, x.x() - center.x(), x.y() - center.y());
  return (p * coeffs).transpose();
}

PlaneFit fit_displacement(const PolyMesh& mesh, const std::vector<int>& nodes, const Eigen::VectorXd& u) {
  std::vector<Vec2> pts;
  for (int id : nodes) pts.push_back(mesh.nodes[id].pos);
  const LinearBasis basis = make_basis(pts);
  if (!well_posed(basis.A))
    throw Error(ErrorKind::SingularFit, fmt::format("{} patch nodes are collinear", nodes.size()));
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(nodes.size()), 2);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    rhs.row(static_cast<Eigen::Index>(i)) = nodal_displacement(u, nodes[i]).transpose();
  // Normal equations A^T A a = A^T b, solved in the scaled basis.
  const Eigen::Matrix3d N = basis.A.transpose() * basis.A;
  Eigen::Matrix<double, 3, 2> a = N.ldlt().solve(basis.A.transpose() * rhs);
  a.row(1) /= basis.scale;
  a.row(2) /= basis.scale;
  PlaneFit fit;
  fit.center = basis.center;
  fit.coeffs = a;
  return fit;
}

double displacement_indicator(const PolyMesh& mesh, const Patch& patch, const Eigen::VectorXd& u) {
  const PlaneFit fit = fit_displacement(mesh, patch.nodes, u);
  double sum = 0.0;
  for (int id : patch.nodes) sum += (fit(mesh.nodes[id].pos) - nodal_displacement(u, id)).squaredNorm();
  return std::sqrt(sum);
}

RecoveredStress recover_stress(const PolyMesh& mesh, const SolutionField& solution) {
  const int nv = mesh.num_nodes();
  const int ne = mesh.num_elements();
  std::vector<Vec2> centroid(ne);
  for (int e = 0; e < ne; ++e) centroid[e] = mesh.geometry(e).centroid;

  RecoveredStress out;
  out.sigma.assign(nv, Voigt::Zero());
  out.samples.assign(nv, 0);
  for (int i = 0; i < nv; ++i) {
    std::vector<int> set = mesh.node_elements[i];
    std::sort(set.begin(), set.end());
    LinearBasis basis;
    for (;;) {
      std::vector<Vec2> pts;
      for (int e : set) pts.push_back(centroid[e]);
      basis = make_basis(pts);
      if (well_posed(basis.A)) break;
      if (static_cast<int>(set.size()) == ne)
        throw Error(ErrorKind::RecoveryFailure, fmt::format("no three non-collinear centroids around node {}", i));
      std::set<int> grown(set.begin(), set.end());
      for (int e : set)
        for (int v : mesh.elements[e].vertices)
          for (int f : mesh.node_elements[v]) grown.insert(f);
      set.assign(grown.begin(), grown.end());
    }
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(set.size()), 3);
    for (std::size_t k = 0; k < set.size(); ++k)
      rhs.row(static_cast<Eigen::Index>(k)) = solution.element_stress[set[k]].transpose();
    const Eigen::Matrix3d N = basis.A.transpose() * basis.A;
    const Eigen::Matrix3d a = N.ldlt().solve(basis.A.transpose() * rhs);
    out.sigma[i] = (basis.row(mesh.nodes[i].pos) * a).transpose();
    out.samples[i] = static_cast<int>(set.size());
  }
  return out;
}

double energy_indicator(const PolyMesh& mesh, const Patch& patch, const SolutionField& solution,
                        const RecoveredStress& recovered, const Material& material) {
  const Eigen::Matrix3d C = material.compliance();
  Voigt mean = Voigt::Zero();
  double area = 0.0;
  for (int e : patch.elements) {
    mean += solution.element_stress[e];
    area += signed_area(mesh.polygon(e));
  }
  mean /= static_cast<double>(patch.elements.size());
  double sum = 0.0;
  for (int id : patch.nodes) {
    const Voigt d = recovered.sigma[id] - mean;
    sum += d.dot(C * d);
  }
  return std::sqrt(std::max(0.0, 0.5 * area / static_cast<double>(patch.nodes.size()) * sum));
}

std::vector<double> patch_indicators(const PolyMesh& mesh, const SolutionField& solution, const Material& material,
                                     IndicatorKind kind) {
  std::vector<double> out(mesh.num_nodes(), 0.0);
  RecoveredStress rec;
  if (kind == IndicatorKind::energy) rec = recover_stress(mesh, solution);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Patch p = make_patch(mesh, i);
    out[i] = kind == IndicatorKind::displacement ? displacement_indicator(mesh, p, solution.u)
                                                 : energy_indicator(mesh, p, solution, rec, material);
  }
  return out;
}

ErrorNorm global_energy_error(const PolyMesh& mesh, const SolutionField& solution, const RecoveredStress& recovered,
                              const Material& material) {
  const Eigen::Matrix3d C = material.compliance();
  ErrorNorm out;
  out.element_sq.assign(mesh.num_elements(), 0.0);
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& v = mesh.elements[e].vertices;
    double s = 0.0;
    for (int id : v) {
      const Voigt d = recovered.sigma[id] - solution.element_stress[e];
      s += d.dot(C * d);
    }
    out.element_sq[e] = 0.5 * signed_area(mesh.polygon(e)) / static_cast<double>(v.size()) * s;
    sum += out.element_sq[e];
  }
  out.total = std::sqrt(std::max(0.0, sum));
  return out;
}

ErrorNorm h1_error(const PolyMesh& mesh, const Eigen::VectorXd& u, const ReferenceFn& reference,
                   GradientComparison mode) {
  std::vector<ReferenceValue> ref(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) ref[i] = reference(mesh.nodes[i].pos);

  auto sym = [](const Eigen::Matrix2d& g) -> Eigen::Matrix2d { return 0.5 * (g + g.transpose()); };
  ErrorNorm out;
  out.element_sq.assign(mesh.num_elements(), 0.0);
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& v = mesh.elements[e].vertices;
    Eigen::Matrix2d G = mean_gradient(mesh, e, u);
    if (mode == GradientComparison::symmetric) G = sym(G);
    double s = 0.0;
    for (int id : v) {
      const Eigen::Matrix2d gr = mode == GradientComparison::symmetric ? sym(ref[id].grad) : ref[id].grad;
      s += (ref[id].u - nodal_displacement(u, id)).squaredNorm() + (gr - G).squaredNorm();
    }
    out.element_sq[e] = signed_area(mesh.polygon(e)) / static_cast<double>(v.size()) * s;
    sum += out.element_sq[e];
  }
  out.total = std::sqrt(sum);
  return out;
}

}  // namespace vemc
