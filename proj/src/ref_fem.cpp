#include "vemc/ref_fem.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "vemc/error.hpp"
#include "vemc/vem.hpp"

namespace vemc {

namespace {

constexpr char kMagic[8] = {'V', 'E', 'M', 'C', 'R', 'E', 'F', '\0'};
constexpr std::uint32_t kVersion = 1;

// 1D quadratic Lagrange basis on [-1, 1] with nodes -1, 0, 1.
std::array<double, 3> lag(double t) {
  return {0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)};
}
std::array<double, 3> dlag(double t) {
  return {t - 0.5, -2.0 * t, t + 0.5};
}

const std::array<double, 3> kGaussX = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
const std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Local node k = 3 b + a sits at lattice offset (a, b).
Eigen::Matrix<double, 18, 18> cell_stiffness(double hx, double hy, const Eigen::Matrix3d& D) {
  Eigen::Matrix<double, 18, 18> K = Eigen::Matrix<double, 18, 18>::Zero();
  const double jx = 2.0 / hx, jy = 2.0 / hy, detj = 0.25 * hx * hy;
  for (int gi = 0; gi < 3; ++gi)
    for (int gj = 0; gj < 3; ++gj) {
      const auto Lx = lag(kGaussX[gi]), Ly = lag(kGaussX[gj]);
      const auto dLx = dlag(kGaussX[gi]), dLy = dlag(kGaussX[gj]);
      Eigen::Matrix<double, 3, 18> B = Eigen::Matrix<double, 3, 18>::Zero();
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) {
          const int k = 3 * b + a;
          const double nx = dLx[a] * Ly[b] * jx, ny = Lx[a] * dLy[b] * jy;
          B(0, 2 * k) = nx;
          B(1, 2 * k + 1) = ny;
          B(2, 2 * k) = ny;
          B(2, 2 * k + 1) = nx;
        }
      K += kGaussW[gi] * kGaussW[gj] * detj * B.transpose() * D * B;
    }
  return K;
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorKind::IoError, "truncated reference cache");
  return v;
}

}  // namespace

RefField::RefField(Vec2 origin, double hx, double hy, int nx, int ny, std::vector<char> active, Eigen::VectorXd u)
    : origin_(origin), hx_(hx), hy_(hy), nx_(nx), ny_(ny), active_(std::move(active)), u_(std::move(u)) {}

Vec2 RefField::lattice_point(int i, int j) const {
  return origin_ + Vec2(0.5 * hx_ * i, 0.5 * hy_ * j);
}

ReferenceValue RefField::eval_in_cell(int cx, int cy, const Vec2& x) const {
  const double xi = 2.0 * (x.x() - origin_.x()) / hx_ - (2 * cx + 1);
  const double eta = 2.0 * (x.y() - origin_.y()) / hy_ - (2 * cy + 1);
  const auto Lx = lag(xi), Ly = lag(eta), dLx = dlag(xi), dLy = dlag(eta);
  const int stride = 2 * nx_ + 1;
  ReferenceValue r;
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) {
      const int node = (2 * cy + b) * stride + (2 * cx + a);
      const Vec2 un(u_[2 * node], u_[2 * node + 1]);
      r.u += Lx[a] * Ly[b] * un;
      r.grad.col(0) += dLx[a] * Ly[b] * (2.0 / hx_) * un;
      r.grad.col(1) += Lx[a] * dLy[b] * (2.0 / hy_) * un;
    }
  return r;
}

ReferenceValue RefField::evaluate(const Vec2& x) const {
  const double fx = (x.x() - origin_.x()) / hx_, fy = (x.y() - origin_.y()) / hy_;
  const double tol = 1e-9 * std::max(nx_, ny_);
  const int cx = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 1);
  if (fx < -tol || fy < -tol || fx > nx_ + tol || fy > ny_ + tol)
    throw Error(ErrorKind::OutOfDomain, fmt::format("point ({}, {}) outside the reference grid", x.x(), x.y()));
  for (int dy : {0, -1, 1})
    for (int dx : {0, -1, 1}) {
      const int i = cx + dx, j = cy + dy;
      if (i < 0 || j < 0 || i >= nx_ || j >= ny_ || !active_[j * nx_ + i]) continue;
      if (fx < i - tol || fx > i + 1 + tol || fy < j - tol || fy > j + 1 + tol) continue;
      return eval_in_cell(i, j, x);
    }
  throw Error(ErrorKind::OutOfDomain, fmt::format("point ({}, {}) outside the reference domain", x.x(), x.y()));
}

ReferenceFn RefField::as_function() const {
  return [self = *this](const Vec2& x) { return self.evaluate(x); };
}

RefField solve_reference(const BvpSpec& bvp, const Material& material, int n) {
  const Domain& dom = bvp.domain;
  const Vec2 origin = dom.bbox_min();
  const Vec2 size = dom.bbox_max() - dom.bbox_min();
  const int nx = n, ny = n;
  const double hx = size.x() / nx, hy = size.y() / ny;
  const double tol = dom.eps();

  std::vector<char> active(static_cast<std::size_t>(nx) * ny, 0);
  double covered = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 c = origin + Vec2((i + 0.5) * hx, (j + 0.5) * hy);
      if (dom.contains(c)) {
        active[j * nx + i] = 1;
        covered += hx * hy;
      }
    }
  if (std::abs(covered - dom.area()) > 1e-10 * dom.area())
    throw Error(ErrorKind::ReferenceUnavailable, fmt::format("{}x{} grid does not fit the domain boundary", nx, ny));
  // Traction ends must sit on cell corners and Dirichlet ends on lattice
  // nodes, otherwise part of the data would fall between nodes.
  auto on_lattice = [&](const Vec2& p, double step) {
    const double fx = (p.x() - origin.x()) / (step * hx), fy = (p.y() - origin.y()) / (step * hy);
    return std::abs(fx - std::round(fx)) * step * hx <= tol && std::abs(fy - std::round(fy)) * step * hy <= tol;
  };
  for (const auto& nc : bvp.neumann)
    if (!on_lattice(nc.segment.a, 1.0) || !on_lattice(nc.segment.b, 1.0))
      throw Error(ErrorKind::ReferenceUnavailable, fmt::format("{}x{} grid splits a traction segment", nx, ny));
  for (const auto& dc : bvp.dirichlet)
    if (!on_lattice(dc.segment.a, 0.5) || !on_lattice(dc.segment.b, 0.5))
      throw Error(ErrorKind::ReferenceUnavailable, fmt::format("{}x{} grid misses a Dirichlet end point", nx, ny));

  const int stride = 2 * nx + 1;
  const int n_lat = stride * (2 * ny + 1);
  std::vector<int> dof_of(n_lat, -1);
  int n_nodes = 0;
  auto lat = [stride](int i, int j) { return j * stride + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!active[j * nx + i]) continue;
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) {
          int& d = dof_of[lat(2 * i + a, 2 * j + b)];
          if (d < 0) d = n_nodes++;
        }
    }
  auto point = [&](int li) -> Vec2 { return origin + Vec2(0.5 * hx * (li % stride), 0.5 * hy * (li / stride)); };

  const int ndof = 2 * n_nodes;
  const Eigen::Matrix<double, 18, 18> Ke = cell_stiffness(hx, hy, material.D);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(324) * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!active[j * nx + i]) continue;
      std::array<int, 9> nd;
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) nd[3 * b + a] = dof_of[lat(2 * i + a, 2 * j + b)];
      for (int p = 0; p < 9; ++p)
        for (int q = 0; q < 9; ++q)
          for (int cp = 0; cp < 2; ++cp)
            for (int cq = 0; cq < 2; ++cq)
              trip.emplace_back(2 * nd[p] + cp, 2 * nd[q] + cq, Ke(2 * p + cp, 2 * q + cq));
      if (bvp.body_force) {
        for (int gi = 0; gi < 3; ++gi)
          for (int gj = 0; gj < 3; ++gj) {
            const auto Lx = lag(kGaussX[gi]), Ly = lag(kGaussX[gj]);
            const Vec2 x = origin + Vec2((i + 0.5 * (1 + kGaussX[gi])) * hx, (j + 0.5 * (1 + kGaussX[gj])) * hy);
            const Vec2 bf = bvp.body_force(x) * kGaussW[gi] * kGaussW[gj] * 0.25 * hx * hy;
            for (int b = 0; b < 3; ++b)
              for (int a = 0; a < 3; ++a) f.segment<2>(2 * nd[3 * b + a]) += Lx[a] * Ly[b] * bf;
          }
      }
    }

  // Tractions on boundary cell sides: side nodes (s0, s1, s2) along the side.
  auto cell_active = [&](int i, int j) { return i >= 0 && j >= 0 && i < nx && j < ny && active[j * nx + i]; };
  auto on_seg = [tol](const Vec2& p, const Segment& s) { return distance_to_segment(p, s.a, s.b) <= tol; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!active[j * nx + i]) continue;
      struct Side {
        int di, dj;
        std::array<int, 3> nodes;
        double len;
      };
      const std::array<Side, 4> sides = {{
          {0, -1, {lat(2 * i, 2 * j), lat(2 * i + 1, 2 * j), lat(2 * i + 2, 2 * j)}, hx},
          {0, 1, {lat(2 * i, 2 * j + 2), lat(2 * i + 1, 2 * j + 2), lat(2 * i + 2, 2 * j + 2)}, hx},
          {-1, 0, {lat(2 * i, 2 * j), lat(2 * i, 2 * j + 1), lat(2 * i, 2 * j + 2)}, hy},
          {1, 0, {lat(2 * i + 2, 2 * j), lat(2 * i + 2, 2 * j + 1), lat(2 * i + 2, 2 * j + 2)}, hy},
      }};
      for (const auto& s : sides) {
        if (cell_active(i + s.di, j + s.dj)) continue;
        const Vec2 p0 = point(s.nodes[0]), p2 = point(s.nodes[2]);
        for (const auto& nc : bvp.neumann) {
          if (!on_seg(p0, nc.segment) || !on_seg(p2, nc.segment)) continue;
          for (int g = 0; g < 3; ++g) {
            const auto L = lag(kGaussX[g]);
            const Vec2 x = p0 + 0.5 * (1.0 + kGaussX[g]) * (p2 - p0);
            const Vec2 t = nc.traction(x) * kGaussW[g] * 0.5 * s.len;
            for (int a = 0; a < 3; ++a) f.segment<2>(2 * dof_of[s.nodes[a]]) += L[a] * t;
          }
        }
      }
    }

  SparseMatrix K(ndof, ndof);
  K.setFromTriplets(trip.begin(), trip.end());

  std::map<int, double> fixed;
  for (const auto& dc : bvp.dirichlet)
    for (int li = 0; li < n_lat; ++li) {
      if (dof_of[li] < 0) continue;
      const Vec2 x = point(li);
      if (!on_seg(x, dc.segment)) continue;
      const Vec2 g = dc.value(x);
      for (int c = 0; c < 2; ++c)
        if (dc.mask[c]) fixed[2 * dof_of[li] + c] = g[c];
    }
  AssembledSystem sys;
  sys.K = std::move(K);
  sys.f = std::move(f);
  for (const auto& [d, v] : fixed) {
    sys.fixed_dofs.push_back(d);
    sys.fixed_values.push_back(v);
  }
  if (sys.fixed_dofs.size() < 3) throw Error(ErrorKind::UnconstrainedSystem, "reference problem is unconstrained");

  // The solve path only needs K, f and the fixed dofs; an empty mesh skips
  // the element fields.
  const SolutionField sol = solve(PolyMesh{}, material, sys);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n_lat);
  for (int li = 0; li < n_lat; ++li)
    if (dof_of[li] >= 0) u.segment<2>(2 * li) = sol.u.segment<2>(2 * dof_of[li]);
  return RefField(origin, hx, hy, nx, ny, std::move(active), std::move(u));
}

void save_reference(const RefField& field, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path);
  os.write(kMagic, sizeof kMagic);
  put(os, kVersion);
  put(os, static_cast<std::int32_t>(field.nx()));
  put(os, static_cast<std::int32_t>(field.ny()));
  put(os, field.origin().x());
  put(os, field.origin().y());
  put(os, field.hx());
  put(os, field.hy());
  os.write(field.active().data(), static_cast<std::streamsize>(field.active().size()));
  put(os, static_cast<std::int64_t>(field.values().size()));
  os.write(reinterpret_cast<const char*>(field.values().data()),
           static_cast<std::streamsize>(field.values().size() * sizeof(double)));
  if (!os) throw Error(ErrorKind::IoError, "failed writing " + path);
}

RefField load_reference(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoError, "cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorKind::IoError, "not a reference cache: " + path);
  if (get<std::uint32_t>(is) != kVersion) throw Error(ErrorKind::IoError, "reference cache version mismatch");
  const int nx = get<std::int32_t>(is), ny = get<std::int32_t>(is);
  const double ox = get<double>(is), oy = get<double>(is), hx = get<double>(is), hy = get<double>(is);
  if (nx <= 0 || ny <= 0) throw Error(ErrorKind::IoError, "bad grid size in reference cache");
  std::vector<char> active(static_cast<std::size_t>(nx) * ny);
  is.read(active.data(), static_cast<std::streamsize>(active.size()));
  const auto len = get<std::int64_t>(is);
  if (len != 2LL * (2 * nx + 1) * (2 * ny + 1)) throw Error(ErrorKind::IoError, "bad value count in reference cache");
  Eigen::VectorXd u(len);
  is.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(len * sizeof(double)));
  if (!is) throw Error(ErrorKind::IoError, "truncated reference cache");
  return RefField({ox, oy}, hx, hy, nx, ny, std::move(active), std::move(u));
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RefField cached_reference(const BvpSpec& bvp, const Material& material, int n, const std::string& key,
                          const std::string& dir) {
  const std::string full = fmt::format("{}|n={}|E={:.17g}|nu={:.17g}|mode={}", key, n, material.E, material.nu,
                                       material.mode == PlaneMode::strain ? "strain" : "stress");
  const auto path = std::filesystem::path(dir) / fmt::format("ref_{:016x}.bin", fnv1a(full));
  if (std::filesystem::exists(path)) {
    try {
      return load_reference(path.string());
    } catch (const Error&) {
      // stale or damaged cache: recompute
    }
  }
  RefField field = solve_reference(bvp, material, n);
  std::filesystem::create_directories(dir);
  save_reference(field, path.string());
  return field;
}

}  // namespace vemc
