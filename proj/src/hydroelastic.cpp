#include "tacshear/hydroelastic.hpp"

#include <cmath>

namespace tacshear {

double contact_fraction(double phi_now, double phi_prev) {
  if (phi_now == phi_prev) return phi_now < 0.0 ? 1.0 : 0.0;
  const double num = std::max(-phi_now, 0.0) - std::max(-phi_prev, 0.0);
  if (num == 0.0) return 0.0;
  return num / (phi_prev - phi_now);
}

void StepStats::merge(const StepStats& o) {
  substeps += o.substeps;
  force_clipped += o.force_clipped;
  force_floored += o.force_floored;
  proj_clipped += o.proj_clipped;
  proj_floored += o.proj_floored;
  resets += o.resets;
  max_point_disp = std::max(max_point_disp, o.max_point_disp);
}

HydroelasticModel::HydroelasticModel(SurfaceSamples surface, SdfPtr indenter,
                                     SdfPtr elastomer, TactileGrid grid,
                                     HydroParams params,
                                     double max_substep_disp)
    : surf_(std::move(surface)),
      indenter_(std::move(indenter)),
      elastomer_(std::move(elastomer)),
      grid_(grid),
      params_(params),
      max_substep_disp_(max_substep_disp) {
  if (surf_.count() == 0) throw DataError("model needs surface samples");
  if (!indenter_ || !elastomer_) throw DataError("model needs both SDFs");
  if (max_substep_disp_ <= 0.0)
    throw DataError("substep displacement guard must be positive");
}

TrackerState HydroelasticModel::make_state(const Pose& initial) const {
  const int m = surf_.count();
  TrackerState s;
  s.forces.assign(m, Vec3::Zero());
  s.offsets.assign(m, Vec3::Zero());
  s.prev_points.resize(m);
  s.prev_phi.resize(m);
  s.in_contact.resize(m);
  s.prev_pose = initial;
  for (int j = 0; j < m; ++j) {
    s.prev_points[j] = initial.apply(surf_.points[j]);
    s.prev_phi[j] = elastomer_->value(s.prev_points[j]);
    s.in_contact[j] = s.prev_phi[j] < 0.0;
  }
  return s;
}

namespace {

// Shared recursion for the force tracker (gains E, K, point area, mu) and
// the projection tracker (unit gains, mu_hat). `vec` is -L*n + T.
inline void update_recursion(Vec3& vec, const Vec3& n, double dn, const Vec3& dt,
                             double gain_n, double gain_t, double mu,
                             int& clipped, int& floored) {
  const double load_prev = -vec.dot(n);
  const Vec3 tan_prev = vec - vec.dot(n) * n;

  double load = load_prev + gain_n * dn;
  if (load < 0.0) {
    load = 0.0;
    ++floored;
  }
  Vec3 tan = tan_prev - gain_t * dt;
  const double tn = tan.norm();
  const double cap = mu * load;
  if (tn > cap) {
    tan *= cap / tn;  // tn > cap >= 0 implies tn > 0
    ++clipped;
  }
  vec = -load * n + tan;
}

}  // namespace

StepStats HydroelasticModel::step_once(TrackerState& state,
                                       const Pose& pose_now) const {
  StepStats st;
  const int m = surf_.count();
  const HydroParams& p = params_;
  for (int j = 0; j < m; ++j) {
    const Vec3 o_now = pose_now.apply(surf_.points[j]);
    const Vec3 o_prev = state.prev_points[j];
    const double phi_now = elastomer_->value(o_now);
    const double phi_prev = state.prev_phi[j];
    if (!std::isfinite(phi_now) || !o_now.allFinite())
      throw DegeneracyError("non-finite pose or SDF value during step");

    st.max_point_disp = std::max(st.max_point_disp, (o_now - o_prev).norm());

    if (phi_now > 0.0) {
      // Contact broken: both trackers drop their memory entirely.
      if (state.in_contact[j]) ++st.resets;
      state.forces[j].setZero();
      state.offsets[j].setZero();
    } else {
      const double alpha = contact_fraction(phi_now, phi_prev);
      const Vec3 d = alpha * (o_now - o_prev);
      const Vec3 n = pose_now.rotate(surf_.normals[j]);
      const double dn = d.dot(n);
      const Vec3 dt = d - dn * n;
      const double area = surf_.areas[j];
      update_recursion(state.forces[j], n, dn, dt, p.E * area, p.K * area,
                       p.mu, st.force_clipped, st.force_floored);
      update_recursion(state.offsets[j], n, dn, dt, 1.0, 1.0, p.mu_hat,
                       st.proj_clipped, st.proj_floored);
    }

    state.prev_points[j] = o_now;
    state.prev_phi[j] = phi_now;
    state.in_contact[j] = phi_now < 0.0;
  }
  state.prev_pose = pose_now;
  ++state.step_index;
  return st;
}

StepStats HydroelasticModel::step(TrackerState& state,
                                  const Pose& pose_now) const {
  if (!pose_now.t.allFinite() || !pose_now.q.coeffs().allFinite())
    throw DegeneracyError("non-finite target pose");

  double max_disp = 0.0;
  for (int j = 0; j < surf_.count(); ++j)
    max_disp = std::max(
        max_disp, (pose_now.apply(surf_.points[j]) - state.prev_points[j]).norm());

  int substeps = 1;
  if (max_disp > max_substep_disp_)
    substeps = static_cast<int>(std::ceil(max_disp / max_substep_disp_));

  if (substeps == 1) return step_once(state, pose_now);

  const Pose from = state.prev_pose;
  StepStats total;
  total.substeps = 0;
  for (int k = 1; k <= substeps; ++k) {
    const Pose target = (k == substeps)
                            ? pose_now
                            : interpolate(from, pose_now,
                                          static_cast<double>(k) / substeps);
    StepStats st = step_once(state, target);
    total.merge(st);
  }
  return total;
}

MarkerField HydroelasticModel::dilation(const Pose& pose) const {
  return dilation_field(grid_, find_contacts(grid_, *indenter_, pose),
                        params_.lambda_d);
}

MarkerField HydroelasticModel::shear(const TrackerState& state) const {
  MarkerField out = MarkerField::zeros(grid_);
  const int m = surf_.count();

  // Gather in-contact contributors once; taxel loop stays tight.
  std::vector<int> active;
  active.reserve(m);
  for (int j = 0; j < m; ++j)
    if (state.in_contact[j]) active.push_back(j);
  if (active.empty()) return out;

  std::vector<Vec2> motion(active.size());
  std::vector<Vec2> anchor(active.size());
  std::vector<double> weight(active.size());
  for (size_t a = 0; a < active.size(); ++a) {
    const int j = active[a];
    const Vec3 n = state.prev_pose.rotate(surf_.normals[j]);
    const Vec3 tan = state.forces[j] - state.forces[j].dot(n) * n;
    motion[a] = Vec2(-tan.x(), -tan.y());
    const Vec3 oh = state.prev_points[j] + state.offsets[j];
    anchor[a] = Vec2(oh.x(), oh.y());
    weight[a] = -state.prev_phi[j];
  }

  for (int i = 0; i < grid_.count(); ++i) {
    const Vec2 p = grid_.point2(i);
    KahanVec2 acc;
    for (size_t a = 0; a < active.size(); ++a) {
      const Vec2 v = p - anchor[a];
      acc.add(weight[a] * motion[a] *
              std::exp(-params_.lambda_s * v.squaredNorm()));
    }
    out.d[i] = acc.total();
  }
  return out;
}

MarkerField HydroelasticModel::total(const TrackerState& state) const {
  MarkerField out = dilation(state.prev_pose);
  out += shear(state);
  return out;
}

MarkerField HydroelasticModel::gravity_augmented(const TrackerState& state,
                                                 const Pose& gravity_xf) const {
  TrackerState scratch = state;
  step(scratch, gravity_xf.compose(state.prev_pose));
  return shear(scratch);
}

ForceDecomp HydroelasticModel::decompose_force(const TrackerState& state,
                                               int j) const {
  const Vec3 n = state.prev_pose.rotate(surf_.normals[j]);
  ForceDecomp d;
  d.normal = -state.forces[j].dot(n);
  d.tangential = state.forces[j] - state.forces[j].dot(n) * n;
  return d;
}

ForceDecomp HydroelasticModel::decompose_offset(const TrackerState& state,
                                                int j) const {
  const Vec3 n = state.prev_pose.rotate(surf_.normals[j]);
  ForceDecomp d;
  d.normal = -state.offsets[j].dot(n);
  d.tangential = state.offsets[j] - state.offsets[j].dot(n) * n;
  return d;
}

std::vector<Vec3> recover_forces(const TrackerState& state, double K,
                                 double area) {
  std::vector<Vec3> out(state.offsets.size());
  const double s = K * area;
  for (size_t j = 0; j < out.size(); ++j) out[j] = s * state.offsets[j];
  return out;
}

}  // namespace tacshear
