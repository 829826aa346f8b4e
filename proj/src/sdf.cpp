#include "tacshear/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tacshear/io.hpp"

namespace tacshear {

namespace {

constexpr double kGradStep = 1e-7;  // central-difference step, meters

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  // Ericson, Real-Time Collision Detection 5.1.5: barycentric region tests.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return a + ab * v + ac * w;
}

}  // namespace

Vec3 Sdf::gradient(const Vec3& p) const {
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 hi = p, lo = p;
    hi[k] += kGradStep;
    lo[k] -= kGradStep;
    g[k] = (value(hi) - value(lo)) / (2.0 * kGradStep);
  }
  return g;
}

double Sdf::surface_area() const {
  throw DataError("surface area is not defined for this SDF");
}

SphereSdf::SphereSdf(double radius) : r_(radius) {
  if (radius <= 0.0) throw DataError("sphere radius must be positive");
}

double SphereSdf::value(const Vec3& p) const { return p.norm() - r_; }

Vec3 SphereSdf::gradient(const Vec3& p) const {
  const double n = p.norm();
  if (n < 1e-14) return Vec3(0, 0, 1);
  return p / n;
}

Eigen::AlignedBox3d SphereSdf::bounds() const {
  return {Vec3(-r_, -r_, -r_), Vec3(r_, r_, r_)};
}

double SphereSdf::surface_area() const { return 4.0 * M_PI * r_ * r_; }

BoxSdf::BoxSdf(const Vec3& half_extents) : h_(half_extents) {
  if ((h_.array() <= 0.0).any())
    throw DataError("box half extents must be positive");
}

double BoxSdf::value(const Vec3& p) const {
  const Vec3 q = p.cwiseAbs() - h_;
  const Vec3 outside = q.cwiseMax(0.0);
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside.norm() + inside;
}

Eigen::AlignedBox3d BoxSdf::bounds() const { return {-h_, h_}; }

double BoxSdf::surface_area() const {
  return 8.0 * (h_.x() * h_.y() + h_.y() * h_.z() + h_.z() * h_.x());
}

CylinderSdf::CylinderSdf(double radius, double half_height)
    : r_(radius), hh_(half_height) {
  if (radius <= 0.0 || half_height <= 0.0)
    throw DataError("cylinder radius and half height must be positive");
}

double CylinderSdf::value(const Vec3& p) const {
  const double dr = std::hypot(p.x(), p.y()) - r_;
  const double dz = std::abs(p.z()) - hh_;
  const double ox = std::max(dr, 0.0), oz = std::max(dz, 0.0);
  return std::min(std::max(dr, dz), 0.0) + std::hypot(ox, oz);
}

Eigen::AlignedBox3d CylinderSdf::bounds() const {
  return {Vec3(-r_, -r_, -hh_), Vec3(r_, r_, hh_)};
}

double CylinderSdf::surface_area() const {
  return 2.0 * M_PI * r_ * (2.0 * hh_) + 2.0 * M_PI * r_ * r_;
}

TorusSdf::TorusSdf(double major_radius, double tube_radius)
    : R_(major_radius), r_(tube_radius) {
  if (major_radius <= 0.0 || tube_radius <= 0.0 || tube_radius >= major_radius)
    throw DataError("torus requires 0 < tube radius < major radius");
}

double TorusSdf::value(const Vec3& p) const {
  const double q0 = std::hypot(p.x(), p.y()) - R_;
  return std::hypot(q0, p.z()) - r_;
}

Vec3 TorusSdf::gradient(const Vec3& p) const {
  const double rho = std::hypot(p.x(), p.y());
  const double q0 = rho - R_;
  const double qn = std::hypot(q0, p.z());
  if (rho < 1e-14 || qn < 1e-14) return Vec3(0, 0, 1);
  const double s = q0 / (qn * rho);
  return {p.x() * s, p.y() * s, p.z() / qn};
}

Eigen::AlignedBox3d TorusSdf::bounds() const {
  const double a = R_ + r_;
  return {Vec3(-a, -a, -r_), Vec3(a, a, r_)};
}

double TorusSdf::surface_area() const {
  return 4.0 * M_PI * M_PI * R_ * r_;
}

HalfspaceSdf::HalfspaceSdf(const Vec3& outward_normal, double offset)
    : n_(outward_normal.normalized()), d_(offset) {
  if (outward_normal.norm() < 1e-14)
    throw DataError("halfspace normal must be nonzero");
}

double HalfspaceSdf::value(const Vec3& p) const { return n_.dot(p) - d_; }

Vec3 HalfspaceSdf::gradient(const Vec3&) const { return n_; }

Eigen::AlignedBox3d HalfspaceSdf::bounds() const {
  throw DataError("halfspace has unbounded surface");
}

double TriMesh::area() const {
  double a = 0.0;
  for (const auto& t : tris) {
    const Vec3& p0 = vertices[t[0]];
    a += 0.5 * (vertices[t[1]] - p0).cross(vertices[t[2]] - p0).norm();
  }
  return a;
}

Eigen::AlignedBox3d TriMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

TriMesh load_stl_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mesh file: " + path);

  TriMesh mesh;
  std::string line, word;
  int line_no = 0;
  std::vector<Vec3> facet;
  const auto fail = [&](const std::string& why) {
    throw DataError(path + ":" + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    if (!(ls >> word)) continue;
    if (word == "solid" || word == "endsolid" || word == "outer" ||
        word == "endloop") {
      continue;
    } else if (word == "facet") {
      facet.clear();
    } else if (word == "vertex") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z()) || !v.allFinite())
        fail("malformed vertex");
      facet.push_back(v);
    } else if (word == "endfacet") {
      if (facet.size() != 3) fail("facet does not have exactly 3 vertices");
      const int base = static_cast<int>(mesh.vertices.size());
      for (const auto& v : facet) mesh.vertices.push_back(v);
      mesh.tris.push_back({base, base + 1, base + 2});
    } else {
      fail("unexpected token '" + word + "'");
    }
  }
  if (mesh.tris.empty()) throw DataError(path + ": mesh has no facets");
  return mesh;
}

void save_stl_ascii(const TriMesh& mesh, const std::string& path,
                    const std::string& name) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "solid " << name << "\n";
    for (const auto& t : mesh.tris) {
      const Vec3& a = mesh.vertices[t[0]];
      const Vec3& b = mesh.vertices[t[1]];
      const Vec3& c = mesh.vertices[t[2]];
      Vec3 n = (b - a).cross(c - a);
      const double nn = n.norm();
      n = nn > 0.0 ? Vec3(n / nn) : Vec3(0, 0, 1);
      out << "  facet normal " << format_double(n.x()) << " "
          << format_double(n.y()) << " " << format_double(n.z()) << "\n"
          << "    outer loop\n";
      for (const Vec3* v : {&a, &b, &c})
        out << "      vertex " << format_double(v->x()) << " "
            << format_double(v->y()) << " " << format_double(v->z()) << "\n";
      out << "    endloop\n  endfacet\n";
    }
    out << "endsolid " << name << "\n";
  });
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  return (p - closest_point_on_triangle(p, a, b, c)).norm();
}

double winding_number(const TriMesh& mesh, const Vec3& p) {
  // van Oosterom & Strackee solid angle per triangle, summed over the soup.
  double w = 0.0;
  for (const auto& t : mesh.tris) {
    const Vec3 a = mesh.vertices[t[0]] - p;
    const Vec3 b = mesh.vertices[t[1]] - p;
    const Vec3 c = mesh.vertices[t[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den =
        la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    w += 2.0 * std::atan2(num, den);
  }
  return w / (4.0 * M_PI);
}

GridSdf::GridSdf(int nx, int ny, int nz, const Eigen::AlignedBox3d& box,
                 std::vector<float> data)
    : nx_(nx), ny_(ny), nz_(nz), box_(box), data_(std::move(data)) {
  if (nx < 2 || ny < 2 || nz < 2)
    throw DataError("grid SDF needs at least 2 nodes per axis");
  if (data_.size() != static_cast<size_t>(nx) * ny * nz)
    throw DataError("grid SDF payload size does not match dims");
  if (box_.isEmpty() || (box_.sizes().array() <= 0.0).any())
    throw DataError("grid SDF bounds must have positive extent");
  cell_ = box_.sizes().array() /
          Vec3(nx - 1.0, ny - 1.0, nz - 1.0).array();
}

double GridSdf::value(const Vec3& p) const {
  if (!allow_extrapolation_ && !box_.contains(p))
    throw DataError("grid SDF query outside lattice bounds");
  const Vec3 q = p.cwiseMax(box_.min()).cwiseMin(box_.max());
  const Vec3 u = (q - box_.min()).array() / cell_.array();
  const int ix = std::min(static_cast<int>(u.x()), nx_ - 2);
  const int iy = std::min(static_cast<int>(u.y()), ny_ - 2);
  const int iz = std::min(static_cast<int>(u.z()), nz_ - 2);
  const double fx = u.x() - ix, fy = u.y() - iy, fz = u.z() - iz;

  const double c00 = at(ix, iy, iz) * (1 - fx) + at(ix + 1, iy, iz) * fx;
  const double c10 = at(ix, iy + 1, iz) * (1 - fx) + at(ix + 1, iy + 1, iz) * fx;
  const double c01 = at(ix, iy, iz + 1) * (1 - fx) + at(ix + 1, iy, iz + 1) * fx;
  const double c11 =
      at(ix, iy + 1, iz + 1) * (1 - fx) + at(ix + 1, iy + 1, iz + 1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

Vec3 GridSdf::gradient(const Vec3& p) const {
  if (!allow_extrapolation_ && !box_.contains(p))
    throw DataError("grid SDF query outside lattice bounds");
  const Vec3 q = p.cwiseMax(box_.min()).cwiseMin(box_.max());
  const Vec3 u = (q - box_.min()).array() / cell_.array();
  const int ix = std::min(static_cast<int>(u.x()), nx_ - 2);
  const int iy = std::min(static_cast<int>(u.y()), ny_ - 2);
  const int iz = std::min(static_cast<int>(u.z()), nz_ - 2);
  const double fx = u.x() - ix, fy = u.y() - iy, fz = u.z() - iz;

  const double c000 = at(ix, iy, iz), c100 = at(ix + 1, iy, iz);
  const double c010 = at(ix, iy + 1, iz), c110 = at(ix + 1, iy + 1, iz);
  const double c001 = at(ix, iy, iz + 1), c101 = at(ix + 1, iy, iz + 1);
  const double c011 = at(ix, iy + 1, iz + 1), c111 = at(ix + 1, iy + 1, iz + 1);

  Vec3 g;
  g.x() = ((c100 - c000) * (1 - fy) * (1 - fz) + (c110 - c010) * fy * (1 - fz) +
           (c101 - c001) * (1 - fy) * fz + (c111 - c011) * fy * fz) /
          cell_.x();
  g.y() = ((c010 - c000) * (1 - fx) * (1 - fz) + (c110 - c100) * fx * (1 - fz) +
           (c011 - c001) * (1 - fx) * fz + (c111 - c101) * fx * fz) /
          cell_.y();
  g.z() = ((c001 - c000) * (1 - fx) * (1 - fy) + (c101 - c100) * fx * (1 - fy) +
           (c011 - c010) * (1 - fx) * fy + (c111 - c110) * fx * fy) /
          cell_.z();
  return g;
}

Eigen::AlignedBox3d GridSdf::bounds() const { return box_; }

double GridSdf::surface_area() const {
  if (known_area_) return *known_area_;
  // Coarea estimate: integrate a smoothed surface delta over the lattice.
  const double eps = 1.5 * cell_.maxCoeff();
  const double cell_vol = cell_.prod();
  double area = 0.0;
  for (int ix = 1; ix + 1 < nx_; ++ix)
    for (int iy = 1; iy + 1 < ny_; ++iy)
      for (int iz = 1; iz + 1 < nz_; ++iz) {
        const double phi = at(ix, iy, iz);
        if (std::abs(phi) >= eps) continue;
        const Vec3 g((at(ix + 1, iy, iz) - at(ix - 1, iy, iz)) / (2 * cell_.x()),
                     (at(ix, iy + 1, iz) - at(ix, iy - 1, iz)) / (2 * cell_.y()),
                     (at(ix, iy, iz + 1) - at(ix, iy, iz - 1)) / (2 * cell_.z()));
        const double delta = (1.0 + std::cos(M_PI * phi / eps)) / (2.0 * eps);
        area += delta * g.norm() * cell_vol;
      }
  if (area <= 0.0)
    throw DegeneracyError("grid SDF has no zero crossing inside its lattice");
  return area;
}

namespace {

std::array<int, 3> lattice_dims(const Eigen::AlignedBox3d& box, double cell) {
  std::array<int, 3> n;
  for (int k = 0; k < 3; ++k)
    n[k] = std::max(2, static_cast<int>(std::ceil(box.sizes()[k] / cell)) + 1);
  return n;
}

}  // namespace

GridSdf GridSdf::from_sdf(const Sdf& sdf, double cell, double margin) {
  if (cell <= 0.0) throw DataError("grid cell size must be positive");
  Eigen::AlignedBox3d box = sdf.bounds();
  box.min().array() -= margin;
  box.max().array() += margin;
  const auto n = lattice_dims(box, cell);
  std::vector<float> data(static_cast<size_t>(n[0]) * n[1] * n[2]);
  const Vec3 step = box.sizes().array() /
                    Vec3(n[0] - 1.0, n[1] - 1.0, n[2] - 1.0).array();
  size_t idx = 0;
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int iz = 0; iz < n[2]; ++iz)
        data[idx++] = static_cast<float>(sdf.value(
            box.min() + Vec3(ix * step.x(), iy * step.y(), iz * step.z())));
  return GridSdf(n[0], n[1], n[2], box, std::move(data));
}

GridSdf GridSdf::from_mesh(const TriMesh& mesh, double cell, double margin) {
  if (cell <= 0.0) throw DataError("grid cell size must be positive");
  Eigen::AlignedBox3d box = mesh.bounds();
  box.min().array() -= margin;
  box.max().array() += margin;
  const auto n = lattice_dims(box, cell);
  std::vector<float> data(static_cast<size_t>(n[0]) * n[1] * n[2]);
  const Vec3 step = box.sizes().array() /
                    Vec3(n[0] - 1.0, n[1] - 1.0, n[2] - 1.0).array();
  size_t idx = 0;
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int iz = 0; iz < n[2]; ++iz) {
        const Vec3 p =
            box.min() + Vec3(ix * step.x(), iy * step.y(), iz * step.z());
        double d = std::numeric_limits<double>::infinity();
        for (const auto& t : mesh.tris)
          d = std::min(d, point_triangle_distance(p, mesh.vertices[t[0]],
                                                  mesh.vertices[t[1]],
                                                  mesh.vertices[t[2]]));
        const double sign = winding_number(mesh, p) > 0.5 ? -1.0 : 1.0;
        data[idx++] = static_cast<float>(sign * d);
      }
  GridSdf g(n[0], n[1], n[2], box, std::move(data));
  g.set_known_area(mesh.area());
  return g;
}

namespace {

constexpr char kGridMagic[8] = {'T', 'A', 'C', 'S', 'D', 'F', 'B', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& v, const std::string& what) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("grid SDF file truncated reading " + what);
}

}  // namespace

void GridSdf::save(const std::string& path) const {
  write_file_atomic(path, [&](std::ostream& out) {
    out.write(kGridMagic, sizeof(kGridMagic));
    const uint32_t dims[4] = {static_cast<uint32_t>(nx_),
                              static_cast<uint32_t>(ny_),
                              static_cast<uint32_t>(nz_), 4u};
    for (uint32_t d : dims) write_raw(out, d);
    const double b[6] = {box_.min().x(), box_.min().y(), box_.min().z(),
                         box_.max().x(), box_.max().y(), box_.max().z()};
    for (double v : b) write_raw(out, v);
    out.write(reinterpret_cast<const char*>(data_.data()),
              static_cast<std::streamsize>(data_.size() * sizeof(float)));
  }, /*binary=*/true);
}

GridSdf GridSdf::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open grid SDF file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kGridMagic, sizeof(magic)) != 0)
    throw DataError(path + ": not a grid SDF file (bad magic)");
  uint32_t nx, ny, nz, width;
  read_raw(in, nx, "dims");
  read_raw(in, ny, "dims");
  read_raw(in, nz, "dims");
  read_raw(in, width, "float width");
  if (width != 4)
    throw DataError(path + ": unsupported float width " + std::to_string(width));
  double b[6];
  for (double& v : b) read_raw(in, v, "bounds");
  const size_t count = static_cast<size_t>(nx) * ny * nz;
  if (nx < 2 || ny < 2 || nz < 2 || count > (1u << 30))
    throw DataError(path + ": implausible lattice dims");
  std::vector<float> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw DataError(path + ": payload truncated");
  return GridSdf(static_cast<int>(nx), static_cast<int>(ny),
                 static_cast<int>(nz),
                 Eigen::AlignedBox3d(Vec3(b[0], b[1], b[2]),
                                     Vec3(b[3], b[4], b[5])),
                 std::move(data));
}

}  // namespace tacshear
