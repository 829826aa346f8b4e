#include "tacshear/fots.hpp"

#include <cmath>

namespace tacshear {

FotsDilateTable FotsDilateTable::build(const TactileGrid& grid,
                                       double lambda_d) {
  FotsDilateTable t;
  t.n = grid.count();
  t.w.resize(static_cast<size_t>(t.n) * t.n);
  for (int i = 0; i < t.n; ++i) {
    const Vec2 p = grid.point2(i);
    for (int c = 0; c < t.n; ++c) {
      const Vec2 v = p - grid.point2(c);
      t.w[static_cast<size_t>(i) * t.n + c] =
          v * std::exp(-lambda_d * v.squaredNorm());
    }
  }
  return t;
}

MarkerField fots_dilate(const TactileGrid& grid, const ContactSet& contacts,
                        double lambda_d) {
  MarkerField out = MarkerField::zeros(grid);
  if (contacts.empty()) return out;
  std::vector<Vec2> cpos(contacts.idx.size());
  for (size_t c = 0; c < cpos.size(); ++c)
    cpos[c] = grid.point2(contacts.idx[c]);
  for (int i = 0; i < grid.count(); ++i) {
    const Vec2 p = grid.point2(i);
    KahanVec2 acc;
    for (size_t c = 0; c < cpos.size(); ++c) {
      const Vec2 v = p - cpos[c];
      const Vec2 w = v * std::exp(-lambda_d * v.squaredNorm());
      acc.add(contacts.depth[c] * w);
    }
    out.d[i] = acc.total();
  }
  return out;
}

MarkerField fots_dilate(const TactileGrid& grid, const ContactSet& contacts,
                        const FotsDilateTable& table) {
  if (table.n != grid.count())
    throw DataError("dilate table size does not match grid");
  MarkerField out = MarkerField::zeros(grid);
  if (contacts.empty()) return out;
  for (int i = 0; i < grid.count(); ++i) {
    KahanVec2 acc;
    for (size_t c = 0; c < contacts.idx.size(); ++c)
      acc.add(contacts.depth[c] * table.at(i, contacts.idx[c]));
    out.d[i] = acc.total();
  }
  return out;
}

MarkerField fots_shear(const TactileGrid& grid, const Vec2& delta_s,
                       const Vec2& center, double lambda_s, double shear_max) {
  MarkerField out = MarkerField::zeros(grid);
  Vec2 ds = delta_s;
  const double n = ds.norm();
  if (n > shear_max) ds *= shear_max / n;
  for (int i = 0; i < grid.count(); ++i) {
    const Vec2 v = grid.point2(i) - center;
    out.d[i] = ds * std::exp(-lambda_s * v.squaredNorm());
  }
  return out;
}

MarkerField fots_twist(const TactileGrid& grid, double delta_theta,
                       const Vec2& center, double lambda_t, double twist_max) {
  MarkerField out = MarkerField::zeros(grid);
  const double th =
      std::clamp(delta_theta, -twist_max, twist_max);
  for (int i = 0; i < grid.count(); ++i) {
    const Vec2 r = grid.point2(i) - center;
    const Vec2 circ(-r.y(), r.x());
    out.d[i] = th * circ * std::exp(-lambda_t * r.squaredNorm());
  }
  return out;
}

MarkerField fots_field(const TactileGrid& grid, const FotsParams& params,
                       const FotsDilateTable& table, const ContactSet& contacts,
                       const FotsMotion& motion) {
  MarkerField out = fots_dilate(grid, contacts, table);
  out += fots_shear(grid, motion.delta_s, motion.center, params.lambda_s,
                    params.shear_max);
  out += fots_twist(grid, motion.delta_theta, motion.center, params.lambda_t,
                    params.twist_max);
  return out;
}

double yaw_angle(const Quat& q) {
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

Vec2 contact_centroid(const TactileGrid& grid, const ContactSet& contacts) {
  if (contacts.empty()) throw DataError("centroid of empty contact set");
  Vec2 num = Vec2::Zero();
  double den = 0.0;
  for (size_t c = 0; c < contacts.idx.size(); ++c) {
    num += contacts.depth[c] * grid.point2(contacts.idx[c]);
    den += contacts.depth[c];
  }
  return num / den;
}

FotsSession::FotsSession(FotsParams params, TactileGrid grid, SdfPtr indenter)
    : params_(params),
      grid_(grid),
      indenter_(std::move(indenter)),
      table_(FotsDilateTable::build(grid_, params_.lambda_d)) {
  if (!indenter_) throw DataError("FOTS session needs an indenter SDF");
}

void FotsSession::reset() { anchored_ = false; }

FotsMotion FotsSession::motion(const Pose& pose_now) const {
  FotsMotion m;
  if (!anchored_) return m;
  m.delta_s = (pose_now.t - first_pose_.t).head<2>();
  m.delta_theta = yaw_angle((pose_now.q * first_pose_.q.conjugate()).normalized());
  m.center = params_.center_mode == FotsParams::CenterMode::ObjectFrame
                 ? Vec2(pose_now.t.head<2>())
                 : patch_center_;
  return m;
}

MarkerField FotsSession::step(const Pose& pose_now) {
  const ContactSet contacts = find_contacts(grid_, *indenter_, pose_now);
  if (contacts.empty()) {
    // Contact break: next touch re-anchors both the SE(2) reference and the
    // patch-mode center.
    anchored_ = false;
    return MarkerField::zeros(grid_);
  }
  if (!anchored_) {
    anchored_ = true;
    first_pose_ = pose_now;
    patch_center_ = contact_centroid(grid_, contacts);
  }
  return fots_field(grid_, params_, table_, contacts, motion(pose_now));
}

}  // namespace tacshear
