#include "vemc/vem.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "vemc/error.hpp"

namespace vemc {

namespace {

// Per-vertex weights q_a = (1 / 2|E|) (n L of the incoming edge + n L of the
// outgoing edge), so that int_dE v n ds / |E| = sum_a v_a q_a for linear traces.
std::vector<Vec2> boundary_weights(const Polygon& poly, double& area) {
  const std::size_t n = poly.size();
  area = signed_area(poly);
  const double h = diameter(poly);
  if (!(area > 1e-18 * h * h)) throw Error(ErrorKind::DegenerateElement, "element area is (near) zero");
  std::vector<Vec2> q(n, Vec2::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Vec2 d = poly[j] - poly[i];
    const Vec2 nl(d.y(), -d.x());  // outward normal times edge length
    q[i] += nl;
    q[j] += nl;
  }
  for (auto& v : q) v /= 2.0 * area;
  return q;
}

}  // namespace

Eigen::MatrixXd projection_matrix(const PolyMesh& mesh, int element) {
  double area = 0.0;
  const auto q = boundary_weights(mesh.polygon(element), area);
  const int n = static_cast<int>(q.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 2 * n);
  for (int a = 0; a < n; ++a) {
    P(0, 2 * a) = q[a].x();
    P(1, 2 * a + 1) = q[a].y();
    P(2, 2 * a) = q[a].y();
    P(2, 2 * a + 1) = q[a].x();
  }
  return P;
}

Eigen::Matrix2d mean_gradient(const PolyMesh& mesh, int element, const Eigen::VectorXd& u) {
  double area = 0.0;
  const auto q = boundary_weights(mesh.polygon(element), area);
  const auto& v = mesh.elements[element].vertices;
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (std::size_t a = 0; a < v.size(); ++a) G += nodal_displacement(u, v[a]) * q[a].transpose();
  return G;
}

ElementStiffness element_stiffness(const PolyMesh& mesh, int element, const Material& material) {
  const Polygon poly = mesh.polygon(element);
  const int n = static_cast<int>(poly.size());
  const Eigen::MatrixXd P = projection_matrix(mesh, element);
  const double area = signed_area(poly);

  ElementStiffness out;
  out.Kc = area * P.transpose() * material.D * P;

  const Vec2 xc = centroid_area(poly).centroid;
  const double h = diameter(poly);
  Eigen::MatrixXd Q(n, 3);
  for (int a = 0; a < n; ++a) Q.row(a) << 1.0, (poly[a].x() - xc.x()) / h, (poly[a].y() - xc.y()) / h;
  const Eigen::Matrix3d M = Q.transpose() * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(M);
  if (eig.eigenvalues()(0) <= 1e-12 * eig.eigenvalues()(2))
    throw Error(ErrorKind::SingularFit, fmt::format("element {} nodes are collinear", element));
  const Eigen::MatrixXd proj = Q * M.ldlt().solve(Q.transpose());

  out.Ks = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double v = material.mu * ((a == b ? 1.0 : 0.0) - proj(a, b));
      out.Ks(2 * a, 2 * b) = v;
      out.Ks(2 * a + 1, 2 * b + 1) = v;
    }
  out.K = out.Kc + out.Ks;
  return out;
}

AssembledSystem assemble(const PolyMesh& mesh, const Material& material, const BvpSpec& bvp) {
  const int nv = mesh.num_nodes();
  const int ndof = 2 * nv;
  const double tol = bvp.domain.eps();
  AssembledSystem sys;
  sys.f = Eigen::VectorXd::Zero(ndof);

  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& v = mesh.elements[e].vertices;
    const Eigen::MatrixXd K = element_stiffness(mesh, e, material).K;
    const int n = static_cast<int>(v.size());
    for (int a = 0; a < n; ++a)
      for (int ca = 0; ca < 2; ++ca)
        for (int b = 0; b < n; ++b)
          for (int cb = 0; cb < 2; ++cb) {
            const double k = K(2 * a + ca, 2 * b + cb);
            if (k != 0.0) trip.emplace_back(2 * v[a] + ca, 2 * v[b] + cb, k);
          }
    if (bvp.body_force) {
      const double w = signed_area(mesh.polygon(e)) / n;
      for (int a = 0; a < n; ++a) {
        const Vec2 b = bvp.body_force(mesh.nodes[v[a]].pos);
        sys.f[2 * v[a]] += w * b.x();
        sys.f[2 * v[a] + 1] += w * b.y();
      }
    }
  }
  sys.K.resize(ndof, ndof);
  sys.K.setFromTriplets(trip.begin(), trip.end());

  auto on_segment = [tol](const Vec2& p, const Segment& s) { return distance_to_segment(p, s.a, s.b) <= tol; };

  for (const auto& loop : boundary_loops(mesh)) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const int a = loop[i], b = loop[(i + 1) % loop.size()];
      const Vec2& pa = mesh.nodes[a].pos;
      const Vec2& pb = mesh.nodes[b].pos;
      const double len = (pb - pa).norm();
      for (const auto& nc : bvp.neumann) {
        if (!on_segment(pa, nc.segment) || !on_segment(pb, nc.segment)) continue;
        const Vec2 ta = nc.traction(pa), tb = nc.traction(pb);
        sys.f[2 * a] += 0.5 * len * ta.x();
        sys.f[2 * a + 1] += 0.5 * len * ta.y();
        sys.f[2 * b] += 0.5 * len * tb.x();
        sys.f[2 * b + 1] += 0.5 * len * tb.y();
      }
    }
  }

  std::map<int, double> fixed;
  for (const auto& dc : bvp.dirichlet)
    for (int i = 0; i < nv; ++i) {
      if (!on_segment(mesh.nodes[i].pos, dc.segment)) continue;
      const Vec2 g = dc.value(mesh.nodes[i].pos);
      for (int c = 0; c < 2; ++c)
        if (dc.mask[c]) fixed[2 * i + c] = g[c];
    }
  for (const auto& [dof, val] : fixed) {
    sys.fixed_dofs.push_back(dof);
    sys.fixed_values.push_back(val);
  }

  // Rigid modes (two translations, one rotation) restricted to the fixed
  // dofs must have full column rank.
  const Vec2 c = 0.5 * (bvp.domain.bbox_min() + bvp.domain.bbox_max());
  Eigen::MatrixXd R(static_cast<Eigen::Index>(sys.fixed_dofs.size()), 3);
  for (std::size_t k = 0; k < sys.fixed_dofs.size(); ++k) {
    const int dof = sys.fixed_dofs[k];
    const Vec2 p = mesh.nodes[dof / 2].pos - c;
    if (dof % 2 == 0)
      R.row(static_cast<Eigen::Index>(k)) << 1.0, 0.0, -p.y();
    else
      R.row(static_cast<Eigen::Index>(k)) << 0.0, 1.0, p.x();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
  qr.setThreshold(1e-10);
  if (sys.fixed_dofs.size() < 3 || qr.rank() < 3)
    throw Error(ErrorKind::UnconstrainedSystem, "Dirichlet data leaves rigid-body modes free");
  return sys;
}

Eigen::VectorXd solve_spd(const SparseMatrix& K, const Eigen::VectorXd& f) {
  if (K.rows() == 0) return Eigen::VectorXd();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SolverBreakdown, "LDLT factorisation failed");
  Eigen::VectorXd u = ldlt.solve(f);
  const double fn = f.norm();
  for (int it = 0; it < 3; ++it) {
    const Eigen::VectorXd r = f - K * u;
    if (r.norm() <= 1e-10 * fn || fn == 0.0) return u;
    u += ldlt.solve(r);
  }
  if ((f - K * u).norm() > 1e-10 * fn)
    throw Error(ErrorKind::SolverBreakdown, "residual above 1e-10 relative after refinement");
  return u;
}

void compute_element_fields(const PolyMesh& mesh, const Material& material, SolutionField& field) {
  const int ne = mesh.num_elements();
  field.element_strain.assign(ne, Voigt::Zero());
  field.element_stress.assign(ne, Voigt::Zero());
  for (int e = 0; e < ne; ++e) {
    const auto& v = mesh.elements[e].vertices;
    Eigen::VectorXd d(2 * v.size());
    for (std::size_t a = 0; a < v.size(); ++a) d.segment<2>(2 * a) = nodal_displacement(field.u, v[a]);
    field.element_strain[e] = projection_matrix(mesh, e) * d;
    field.element_stress[e] = material.D * field.element_strain[e];
  }
}

SolutionField solve(const PolyMesh& mesh, const Material& material, const AssembledSystem& sys) {
  const int ndof = static_cast<int>(sys.f.size());
  std::vector<int> free_index(ndof, 0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(ndof);
  for (std::size_t k = 0; k < sys.fixed_dofs.size(); ++k) {
    free_index[sys.fixed_dofs[k]] = -1;
    g[sys.fixed_dofs[k]] = sys.fixed_values[k];
  }
  int nfree = 0;
  for (int i = 0; i < ndof; ++i)
    if (free_index[i] >= 0) free_index[i] = nfree++;

  // rhs = f - K g, then keep free rows/cols.
  const Eigen::VectorXd rhs_full = sys.f - sys.K * g;
  Eigen::VectorXd rhs(nfree);
  for (int i = 0; i < ndof; ++i)
    if (free_index[i] >= 0) rhs[free_index[i]] = rhs_full[i];
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.K.nonZeros());
  for (int col = 0; col < sys.K.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(sys.K, col); it; ++it) {
      const int r = free_index[it.row()], c = free_index[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  SparseMatrix Kff(nfree, nfree);
  Kff.setFromTriplets(trip.begin(), trip.end());

  const Eigen::VectorXd uf = solve_spd(Kff, rhs);
  SolutionField field;
  field.u = g;
  for (int i = 0; i < ndof; ++i)
    if (free_index[i] >= 0) field.u[i] = uf[free_index[i]];
  compute_element_fields(mesh, material, field);
  return field;
}

SolutionField solve(const PolyMesh& mesh, const Material& material, const BvpSpec& bvp) {
  return solve(mesh, material, assemble(mesh, material, bvp));
}

}  // namespace vemc
