#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tacshear {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Malformed or inconsistent input data (files, configs, mismatched grids).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical degeneracy: flat calibration objectives, failed surface
// projections, non-finite values.
class DegeneracyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Rigid transform mapping indenter-frame points into the elastomer frame.
// Unit quaternion + translation; composition renormalizes so that repeated
// chaining keeps |q| = 1 to machine precision.
struct Pose {
  Quat q{1.0, 0.0, 0.0, 0.0};
  Vec3 t{0.0, 0.0, 0.0};

  static Pose identity() { return Pose{}; }

  // this o other: apply `other` first, then this.
  Pose compose(const Pose& other) const {
    Pose out;
    out.q = (q * other.q).normalized();
    out.t = q * other.t + t;
    return out;
  }

  Pose inverse() const {
    Pose out;
    out.q = q.conjugate();
    out.t = -(out.q * t);
    return out;
  }

  Vec3 apply(const Vec3& p) const { return q * p + t; }
  Vec3 rotate(const Vec3& v) const { return q * v; }
};

// Screw-free interpolation (slerp + lerp) used for internal substepping.
Pose interpolate(const Pose& a, const Pose& b, double s);

// Timestamped pose trajectory sample.
struct TimedPose {
  double time_s = 0.0;
  Pose pose;
};

// Rectangular marker lattice on the rest surface of the elastomer.
// Markers sit at z = plane_height in the elastomer frame; row-major indexing
// with columns along +x and rows along +y.
struct TactileGrid {
  int rows = 7;
  int cols = 9;
  double spacing_x = 0.065 / 9.0;
  double spacing_y = 0.065 / 9.0;
  double origin_x = -4.0 * (0.065 / 9.0);  // marker (0,0) position
  double origin_y = -3.0 * (0.065 / 9.0);
  double plane_height = 0.0;

  // 7x9 markers centered on a 0.065 m wide active area with square cells.
  static TactileGrid standard() { return TactileGrid{}; }

  static TactileGrid centered(int rows, int cols, double spacing_x,
                              double spacing_y, double plane_height = 0.0);

  int count() const { return rows * cols; }
  int index(int r, int c) const { return r * cols + c; }

  Vec2 point2(int i) const {
    return {origin_x + (i % cols) * spacing_x,
            origin_y + (i / cols) * spacing_y};
  }
  Vec3 point3(int i) const {
    const Vec2 p = point2(i);
    return {p.x(), p.y(), plane_height};
  }

  bool same_geometry(const TactileGrid& o, double tol = 1e-12) const;
};

enum class FieldUnit { Meters, Pixels };

// Conversion factor between metric displacements and camera pixels.
struct PixelScale {
  double px_per_m = 1000.0 / 0.065;
};

// Per-marker 2D displacement field over a TactileGrid, row-major.
struct MarkerField {
  int rows = 0;
  int cols = 0;
  FieldUnit unit = FieldUnit::Meters;
  std::vector<Vec2> d;

  MarkerField() = default;
  MarkerField(int rows_, int cols_, FieldUnit unit_ = FieldUnit::Meters)
      : rows(rows_), cols(cols_), unit(unit_),
        d(static_cast<size_t>(rows_) * cols_, Vec2::Zero()) {}

  static MarkerField zeros(const TactileGrid& g,
                           FieldUnit unit = FieldUnit::Meters) {
    return MarkerField(g.rows, g.cols, unit);
  }

  int count() const { return rows * cols; }

  MarkerField to_pixels(const PixelScale& s) const;
  MarkerField to_meters(const PixelScale& s) const;

  MarkerField& operator+=(const MarkerField& o);
  double max_norm() const;
};

MarkerField operator+(MarkerField a, const MarkerField& b);

// Model gains. E defaults equal to K and mu_hat to mu, which is the
// single-tracker regime where forces are recoverable from offsets.
struct HydroParams {
  double lambda_d = 1.0e4;  // dilation falloff, 1/m^2
  double lambda_s = 4.0e3;  // shear falloff, 1/m^2
  double K = 1.0e3;         // tangential stiffness gain
  double E = 1.0e3;         // normal stiffness gain
  double mu = 0.8;          // friction coefficient, force tracker
  double mu_hat = 0.8;      // friction coefficient, projection tracker

  static HydroParams defaults() { return HydroParams{}; }

  // True when one tracker suffices: forces = K * area * offsets exactly.
  bool single_tracker_consistent() const {
    return E == K && mu == mu_hat;
  }
};

// Fixed-order compensated accumulator (Kahan-Neumaier); keeps batched and
// sequential field sums bit-comparable. Unlike plain Kahan, the correction
// also survives a new term cancelling the running sum, so read the result
// through total(), not sum.
struct KahanVec2 {
  Vec2 sum = Vec2::Zero();
  Vec2 comp = Vec2::Zero();

  void add(const Vec2& v) {
    for (int k = 0; k < 2; ++k) {
      const double t = sum[k] + v[k];
      if (std::abs(sum[k]) >= std::abs(v[k]))
        comp[k] += (sum[k] - t) + v[k];
      else
        comp[k] += (v[k] - t) + sum[k];
      sum[k] = t;
    }
  }

  Vec2 total() const { return sum + comp; }
};

}  // namespace tacshear
