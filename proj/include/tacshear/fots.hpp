#pragma once

#include "tacshear/dilation.hpp"
#include "tacshear/sdf.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// Marker-motion baseline composed of three superposed components around a
// dissipation center: contact-height dilation, clamped shear translation,
// clamped twist circulation.
struct FotsParams {
  double lambda_d = 1.0e4;  // 1/m^2
  double lambda_s = 4.0e3;  // 1/m^2
  double lambda_t = 4.0e3;  // 1/m^2
  double shear_max = 2.0e-3;  // m, magnitude clamp on accumulated translation
  double twist_max = 0.35;    // rad, symmetric clamp on accumulated rotation

  enum class CenterMode {
    ObjectFrame,          // center = current object origin projected
    InitialContactPatch,  // center = penetration-weighted centroid at first
                          // contact, frozen while contact persists
  };
  CenterMode center_mode = CenterMode::ObjectFrame;
};

// Memoized per-taxel-pair dilation kernels: contacts sit on the marker
// lattice, so v * exp(-lambda_d |v|^2) only ever takes n^2 values. Entries
// are computed with the exact expression the plain path evaluates, so the
// memoized sum is bit-identical to the straight loop.
struct FotsDilateTable {
  int n = 0;
  std::vector<Vec2> w;  // row-major, row = field taxel, col = contact taxel

  static FotsDilateTable build(const TactileGrid& grid, double lambda_d);
  const Vec2& at(int taxel, int contact) const {
    return w[static_cast<size_t>(taxel) * n + contact];
  }
};

MarkerField fots_dilate(const TactileGrid& grid, const ContactSet& contacts,
                        double lambda_d);
MarkerField fots_dilate(const TactileGrid& grid, const ContactSet& contacts,
                        const FotsDilateTable& table);

// Accumulated in-plane translation since first contact, magnitude-clamped,
// spread from the center with a Gaussian falloff.
MarkerField fots_shear(const TactileGrid& grid, const Vec2& delta_s,
                       const Vec2& center, double lambda_s, double shear_max);

// Accumulated z-rotation since first contact, clamped to [-max, max]; each
// marker moves along the 90-degree-rotated radial offset (counterclockwise
// circulation for positive angles).
MarkerField fots_twist(const TactileGrid& grid, double delta_theta,
                       const Vec2& center, double lambda_t, double twist_max);

// SE(2) motion extracted from poses relative to the first-contact anchor.
struct FotsMotion {
  Vec2 delta_s = Vec2::Zero();
  double delta_theta = 0.0;
  Vec2 center = Vec2::Zero();
};

// One full field evaluation; shared by the sequential and batched drivers.
MarkerField fots_field(const TactileGrid& grid, const FotsParams& params,
                       const FotsDilateTable& table, const ContactSet& contacts,
                       const FotsMotion& motion);

double yaw_angle(const Quat& q);

// Stateful pose-trajectory adapter: anchors the SE(2) reference (and the
// patch-mode center) at the first nonempty contact set and re-anchors after
// any contact break.
class FotsSession {
public:
  FotsSession(FotsParams params, TactileGrid grid, SdfPtr indenter);

  MarkerField step(const Pose& pose_now);
  void reset();

  bool anchored() const { return anchored_; }
  const Pose& first_pose() const { return first_pose_; }
  Vec2 patch_center() const { return patch_center_; }
  const FotsDilateTable& table() const { return table_; }
  FotsMotion motion(const Pose& pose_now) const;

private:
  FotsParams params_;
  TactileGrid grid_;
  SdfPtr indenter_;
  FotsDilateTable table_;
  bool anchored_ = false;
  Pose first_pose_;
  Vec2 patch_center_ = Vec2::Zero();
};

// Penetration-weighted centroid of a contact set (patch-mode center).
Vec2 contact_centroid(const TactileGrid& grid, const ContactSet& contacts);

}  // namespace tacshear
