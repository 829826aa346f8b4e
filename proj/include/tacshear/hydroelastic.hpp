#pragma once

#include "tacshear/dilation.hpp"
#include "tacshear/sdf.hpp"
#include "tacshear/surface.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// Fraction of the straight-line step spent inside the elastomer, assuming
// the SDF varies linearly along the step: 1 fully inside, 0 fully outside,
// partial on entry/exit. Equal endpoint values degenerate to inside/outside.
double contact_fraction(double phi_now, double phi_prev);

// Recursive per-surface-point contact memory. `forces` is the elastomer's
// restoring reaction on the indenter, stored as f = -L*n + T with normal
// load L >= 0 and cone-clipped tangential T; `offsets` is the same recursion
// at unit stiffness, so o_hat = prev_point + offset is the drag anchor
// (first-contact location until the cone saturates).
struct TrackerState {
  std::vector<Vec3> forces;       // newtons
  std::vector<Vec3> offsets;      // meters
  std::vector<Vec3> prev_points;  // world position at last update
  std::vector<double> prev_phi;   // elastomer SDF at prev_points
  std::vector<uint8_t> in_contact;
  Pose prev_pose;
  long step_index = 0;

  int count() const { return static_cast<int>(forces.size()); }
};

struct StepStats {
  int substeps = 1;
  int force_clipped = 0;   // tangential cone clips, force tracker
  int force_floored = 0;   // normal ReLU floors while in contact
  int proj_clipped = 0;    // same events on the projection tracker
  int proj_floored = 0;
  int resets = 0;          // contact-break zeroings
  double max_point_disp = 0.0;  // largest per-substep point motion, meters

  void merge(const StepStats& o);
};

struct ForceDecomp {
  double normal = 0.0;  // load along the outward indenter normal, >= 0
  Vec3 tangential = Vec3::Zero();
};

// Path-dependent shear model on a flat-pad tactile sensor: tracks contact
// forces at sampled indenter surface points under stick-slip Coulomb
// friction and renders marker displacement fields.
class HydroelasticModel {
public:
  HydroelasticModel(SurfaceSamples surface, SdfPtr indenter, SdfPtr elastomer,
                    TactileGrid grid, HydroParams params,
                    double max_substep_disp = 0.005);

  TrackerState make_state(const Pose& initial) const;

  // Advance to pose_now. Steps whose largest point motion exceeds
  // max_substep_disp are split internally along the interpolated pose path
  // (teleport guard), preserving the recursion's path dependence.
  StepStats step(TrackerState& state, const Pose& pose_now) const;

  // Normal-press component from the markers currently inside the indenter.
  MarkerField dilation(const Pose& pose) const;

  // Tangential component: every in-contact tracked point k spreads its
  // marker-motion vector -f_t^xy, weighted by penetration -phi_E(o_k),
  // with a Gaussian falloff centered on the drag anchor o_hat_k.
  MarkerField shear(const TrackerState& state) const;

  MarkerField total(const TrackerState& state) const;

  // Marker field after one hypothetical step to gravity_xf o pose_now,
  // evaluated on a scratch copy; `state` is untouched.
  MarkerField gravity_augmented(const TrackerState& state,
                                const Pose& gravity_xf) const;

  // Tracked force of point j split against the current world normal.
  ForceDecomp decompose_force(const TrackerState& state, int j) const;
  ForceDecomp decompose_offset(const TrackerState& state, int j) const;

  const SurfaceSamples& surface() const { return surf_; }
  const TactileGrid& grid() const { return grid_; }
  const HydroParams& params() const { return params_; }
  const Sdf& indenter() const { return *indenter_; }
  const Sdf& elastomer() const { return *elastomer_; }
  double max_substep_disp() const { return max_substep_disp_; }

private:
  StepStats step_once(TrackerState& state, const Pose& pose_now) const;

  SurfaceSamples surf_;
  SdfPtr indenter_;
  SdfPtr elastomer_;
  TactileGrid grid_;
  HydroParams params_;
  double max_substep_disp_;
};

// Single-tracker shortcut: with E = K, mu_hat = mu and uniform areas the
// force recursion is the offset recursion scaled by K*area.
std::vector<Vec3> recover_forces(const TrackerState& state, double K,
                                 double area);

}  // namespace tacshear
