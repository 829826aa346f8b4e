#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tacshear/types.hpp"

namespace tacshear {

// Signed distance field: negative inside, positive outside, zero on the
// surface. Analytic shapes are exact Euclidean distances.
class Sdf {
public:
  virtual ~Sdf() = default;

  virtual double value(const Vec3& p) const = 0;

  // Central differences by default; overridden where a closed form exists.
  virtual Vec3 gradient(const Vec3& p) const;

  // Axis-aligned box containing the zero set. Throws DataError for
  // unbounded shapes (see bounded()).
  virtual Eigen::AlignedBox3d bounds() const = 0;
  virtual bool bounded() const { return true; }

  // Area of the zero set; analytic where known, estimated for grids.
  virtual double surface_area() const;
};

using SdfPtr = std::shared_ptr<const Sdf>;

class SphereSdf : public Sdf {
public:
  explicit SphereSdf(double radius);
  double value(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  Eigen::AlignedBox3d bounds() const override;
  double surface_area() const override;
  double radius() const { return r_; }

private:
  double r_;
};

class BoxSdf : public Sdf {
public:
  explicit BoxSdf(const Vec3& half_extents);
  double value(const Vec3& p) const override;
  Eigen::AlignedBox3d bounds() const override;
  double surface_area() const override;

private:
  Vec3 h_;
};

// Finite cylinder, axis along z.
class CylinderSdf : public Sdf {
public:
  CylinderSdf(double radius, double half_height);
  double value(const Vec3& p) const override;
  Eigen::AlignedBox3d bounds() const override;
  double surface_area() const override;

private:
  double r_, hh_;
};

// Ring torus, axis along z: major radius R to the tube center, tube radius r.
class TorusSdf : public Sdf {
public:
  TorusSdf(double major_radius, double tube_radius);
  double value(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  Eigen::AlignedBox3d bounds() const override;
  double surface_area() const override;

private:
  double R_, r_;
};

// phi(p) = <n, p> - offset. Unbounded; used for the flat elastomer pad
// (outward normal +z, surface at z = plane_height).
class HalfspaceSdf : public Sdf {
public:
  HalfspaceSdf(const Vec3& outward_normal, double offset);
  static HalfspaceSdf xy_plane(double plane_height) {
    return HalfspaceSdf(Vec3(0, 0, 1), plane_height);
  }
  double value(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  Eigen::AlignedBox3d bounds() const override;
  bool bounded() const override { return false; }

private:
  Vec3 n_;
  double d_;
};

// Watertight triangle soup (ASCII STL).
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> tris;

  double area() const;
  Eigen::AlignedBox3d bounds() const;
};

TriMesh load_stl_ascii(const std::string& path);
void save_stl_ascii(const TriMesh& mesh, const std::string& path,
                    const std::string& name = "mesh");

// Exact distance from p to triangle (a, b, c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

// Generalized winding number of the mesh around p (1 inside, 0 outside for
// watertight CCW-outward meshes).
double winding_number(const TriMesh& mesh, const Vec3& p);

// Trilinearly interpolated SDF on a regular lattice. Queries outside the
// lattice are clamped to the boundary (value saturates) when extrapolation
// is enabled, and raise DataError otherwise.
class GridSdf : public Sdf {
public:
  GridSdf(int nx, int ny, int nz, const Eigen::AlignedBox3d& box,
          std::vector<float> data);

  double value(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  Eigen::AlignedBox3d bounds() const override;
  double surface_area() const override;

  void set_extrapolation(bool allow) { allow_extrapolation_ = allow; }
  bool extrapolation() const { return allow_extrapolation_; }
  void set_known_area(double a) { known_area_ = a; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  const std::vector<float>& data() const { return data_; }

  // Lattice-sample an arbitrary SDF over its padded bounds.
  static GridSdf from_sdf(const Sdf& sdf, double cell, double margin);

  // Exact point-to-triangle distance, sign from the winding number.
  // Stores the mesh area so sampled patches keep physical weights.
  static GridSdf from_mesh(const TriMesh& mesh, double cell, double margin);

  // Binary lattice format: magic, dims, float width, bounds, row-major
  // float32 payload with index (ix*ny + iy)*nz + iz.
  static GridSdf load(const std::string& path);
  void save(const std::string& path) const;

private:
  double at(int ix, int iy, int iz) const {
    return data_[(static_cast<size_t>(ix) * ny_ + iy) * nz_ + iz];
  }

  int nx_, ny_, nz_;
  Eigen::AlignedBox3d box_;
  Vec3 cell_;
  std::vector<float> data_;
  bool allow_extrapolation_ = true;
  std::optional<double> known_area_;
};

}  // namespace tacshear
