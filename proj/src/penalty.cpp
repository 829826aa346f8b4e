#include "tacshear/penalty.hpp"

#include <cmath>

namespace tacshear {

MarkerField penalty_field(const TactileGrid& grid, const Sdf& indenter,
                          const Pose& pose, const Vec3& angular,
                          const Vec3& linear, const PenaltyParams& params) {
  MarkerField out = MarkerField::zeros(grid);
  const Pose inv = pose.inverse();
  for (int i = 0; i < grid.count(); ++i) {
    const Vec3 p = grid.point3(i);
    const double phi = indenter.value(inv.apply(p));
    if (phi >= 0.0) continue;
    const double normal = params.k_n * (-phi);
    const Vec3 v = linear + angular.cross(p - pose.t);
    Vec2 tang = params.k_t * Vec2(v.x(), v.y());
    const double tn = tang.norm();
    const double cap = params.mu * normal;
    if (tn > cap) tang *= cap / tn;
    out.d[i] = tang;
  }
  return out;
}

}  // namespace tacshear
