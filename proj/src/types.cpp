#include "tacshear/types.hpp"

#include <cmath>

namespace tacshear {

Pose interpolate(const Pose& a, const Pose& b, double s) {
  Pose out;
  out.q = a.q.slerp(s, b.q).normalized();
  out.t = (1.0 - s) * a.t + s * b.t;
  return out;
}

TactileGrid TactileGrid::centered(int rows, int cols, double spacing_x,
                                  double spacing_y, double plane_height) {
  if (rows < 1 || cols < 1 || spacing_x <= 0.0 || spacing_y <= 0.0)
    throw DataError("TactileGrid: rows/cols must be >= 1 and spacings > 0");
  TactileGrid g;
  g.rows = rows;
  g.cols = cols;
  g.spacing_x = spacing_x;
  g.spacing_y = spacing_y;
  g.origin_x = -0.5 * (cols - 1) * spacing_x;
  g.origin_y = -0.5 * (rows - 1) * spacing_y;
  g.plane_height = plane_height;
  return g;
}

bool TactileGrid::same_geometry(const TactileGrid& o, double tol) const {
  return rows == o.rows && cols == o.cols &&
         std::abs(spacing_x - o.spacing_x) <= tol &&
         std::abs(spacing_y - o.spacing_y) <= tol &&
         std::abs(origin_x - o.origin_x) <= tol &&
         std::abs(origin_y - o.origin_y) <= tol &&
         std::abs(plane_height - o.plane_height) <= tol;
}

MarkerField MarkerField::to_pixels(const PixelScale& s) const {
  if (unit == FieldUnit::Pixels) return *this;
  MarkerField out = *this;
  out.unit = FieldUnit::Pixels;
  for (auto& v : out.d) v *= s.px_per_m;
  return out;
}

MarkerField MarkerField::to_meters(const PixelScale& s) const {
  if (unit == FieldUnit::Meters) return *this;
  MarkerField out = *this;
  out.unit = FieldUnit::Meters;
  for (auto& v : out.d) v /= s.px_per_m;
  return out;
}

MarkerField& MarkerField::operator+=(const MarkerField& o) {
  if (rows != o.rows || cols != o.cols)
    throw DataError("MarkerField: size mismatch in +=");
  if (unit != o.unit) throw DataError("MarkerField: unit mismatch in +=");
  for (size_t i = 0; i < d.size(); ++i) d[i] += o.d[i];
  return *this;
}

MarkerField operator+(MarkerField a, const MarkerField& b) {
  a += b;
  return a;
}

double MarkerField::max_norm() const {
  double m = 0.0;
  for (const auto& v : d) m = std::max(m, v.norm());
  return m;
}

}  // namespace tacshear
