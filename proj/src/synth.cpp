#include "tacshear/synth.hpp"

#include <cmath>
#include <random>

#include "tacshear/hydroelastic.hpp"

namespace tacshear {

std::vector<TimedPose> make_motion_trajectory(
    const Vec2& xy, double bottom_offset, double depth, MotionKind motion,
    const Vec2& direction, double magnitude, int press_steps,
    int motion_steps, double dt, double start_clearance) {
  if (press_steps < 1 || depth <= 0)
    throw DataError("press needs at least one step and positive depth");
  const double z_start = bottom_offset + start_clearance;
  const double z_end = bottom_offset - depth;

  std::vector<TimedPose> traj;
  traj.reserve(static_cast<size_t>(press_steps) + motion_steps + 1);
  double t = 0.0;
  Pose pose;
  pose.t = Vec3(xy.x(), xy.y(), z_start);
  traj.push_back({t, pose});
  for (int i = 1; i <= press_steps; ++i) {
    t += dt;
    pose.t.z() = z_start + (z_end - z_start) * i / press_steps;
    traj.push_back({t, pose});
  }
  if (motion == MotionKind::None || motion_steps < 1) return traj;

  const Pose pressed = pose;
  for (int i = 1; i <= motion_steps; ++i) {
    t += dt;
    const double s = static_cast<double>(i) / motion_steps;
    Pose p = pressed;
    switch (motion) {
      case MotionKind::Slide:
        p.t.head<2>() += s * magnitude * direction.normalized();
        break;
      case MotionKind::Twist:
        p.q = Quat(Eigen::AngleAxisd(s * magnitude, Vec3::UnitZ()));
        break;
      case MotionKind::Roll: {
        const Vec2 d = direction.normalized();
        p.q = Quat(Eigen::AngleAxisd(s * magnitude, Vec3(d.x(), d.y(), 0.0)));
        break;
      }
      case MotionKind::None:
        break;
    }
    traj.push_back({t, p});
  }
  return traj;
}

CalibrationSetup make_synth_setup(int surface_samples, uint64_t surface_seed) {
  CalibrationSetup setup;
  setup.indenter = std::make_shared<CylinderSdf>(kSynthPunchRadius,
                                                 kSynthPunchHalfHeight);
  SampleOptions sopts;
  sopts.seed = surface_seed;
  const SurfaceSamples full =
      sample_surface(*setup.indenter, surface_samples, sopts);
  // Track only the flat bottom face. Wall points carry no normal load under
  // a vertical press, so their tangential force rides the edge of the
  // friction cone: it clips at the dataset's finite mu but not in the
  // frictionless shear-fit pass, which would bias the recovered stiffness.
  // The bottom face sees uniform penetration, keeping the cone inactive for
  // every shear sample and the stages exactly decoupled. Rim samples blend
  // the radial and axial gradients, so the cut also drops tilted-normal
  // points (threshold well clear of the exact -1 face normal).
  SurfaceSamples& bottom = setup.surface;
  for (int i = 0; i < full.count(); ++i) {
    if (full.normals[i].z() >= -0.99) continue;
    bottom.points.push_back(full.points[i]);
    bottom.normals.push_back(full.normals[i]);
    bottom.areas.push_back(full.areas[i]);
    bottom.total_area += full.areas[i];
  }
  setup.elastomer = std::make_shared<HalfspaceSdf>(HalfspaceSdf::xy_plane(0.0));
  setup.grid = TactileGrid::standard();
  setup.scale = PixelScale{};
  setup.base = HydroParams::defaults();
  return setup;
}

namespace {

// Center of grid cell (r, c): the point farthest from the four markers
// around it, where the punch footprint covers no marker.
Vec2 cell_center(const TactileGrid& g, int r, int c) {
  return Vec2(g.origin_x + (c + 0.5) * g.spacing_x,
              g.origin_y + (r + 0.5) * g.spacing_y);
}

MarkerField observe(const CalibrationSetup& setup, const HydroParams& truth,
                    const std::vector<TimedPose>& trajectory) {
  const HydroelasticModel model(setup.surface, setup.indenter, setup.elastomer,
                                setup.grid, truth, setup.max_substep_disp);
  TrackerState state = model.make_state(trajectory.front().pose);
  for (size_t i = 1; i < trajectory.size(); ++i)
    model.step(state, trajectory[i].pose);
  return model.total(state).to_pixels(setup.scale);
}

}  // namespace

std::vector<CalibrationSample> make_synth_dataset(
    const CalibrationSetup& setup, const HydroParams& truth,
    const SynthOptions& opts) {
  const TactileGrid& g = setup.grid;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<CalibrationSample> samples;
  const auto add = [&](SampleKind kind, std::vector<TimedPose> traj) {
    CalibrationSample s;
    s.kind = kind;
    s.observed = observe(setup, truth, traj);
    s.trajectory = std::move(traj);
    samples.push_back(std::move(s));
  };

  // Dilation: presses on marker positions in the grid interior, varying
  // depth. A 0.5 mm jitter keeps the footprint on the marker it targets.
  for (int i = 0; i < opts.dilation_samples; ++i) {
    const int r = 2 + i % (g.rows - 4);
    const int c = 2 + (i / (g.rows - 4)) % (g.cols - 4);
    Vec2 xy = g.point2(g.index(r, c));
    xy += 5e-4 * Vec2(2 * unit(rng) - 1, 2 * unit(rng) - 1);
    const double depth = 4e-4 + 6e-4 * unit(rng);
    add(SampleKind::Dilation,
        make_motion_trajectory(xy, kSynthPunchHalfHeight, depth,
                               MotionKind::None, Vec2::UnitX(), 0.0,
                               opts.press_steps, 0, opts.dt));
  }

  // Shear: presses between markers, then short in-plane slides that stay in
  // the static-friction cone (|slide| < mu * depth) and keep the footprint
  // clear of every marker.
  for (int i = 0; i < opts.shear_samples; ++i) {
    const int r = 1 + i % (g.rows - 2);
    const int c = 1 + (i / (g.rows - 2)) % (g.cols - 2);
    const double angle = 2.0 * M_PI * i / std::max(opts.shear_samples, 1);
    add(SampleKind::Shear,
        make_motion_trajectory(cell_center(g, r, c), kSynthPunchHalfHeight,
                               8e-4, MotionKind::Slide,
                               Vec2(std::cos(angle), std::sin(angle)), 3e-4,
                               opts.press_steps, opts.motion_steps, opts.dt));
  }

  // Twist: same between-marker placement, small yaw about the punch axis.
  for (int i = 0; i < opts.twist_samples; ++i) {
    const int r = 2 + i % (g.rows - 4);
    const int c = 2 + (i / (g.rows - 4)) % (g.cols - 4);
    const double angle = (i % 2 == 0 ? 1.0 : -1.0) * 0.2;
    add(SampleKind::Twist,
        make_motion_trajectory(cell_center(g, r, c), kSynthPunchHalfHeight,
                               8e-4, MotionKind::Twist, Vec2::UnitX(), angle,
                               opts.press_steps, opts.motion_steps, opts.dt));
  }

  // Roll: small tilt about an in-plane axis while pressed on a marker.
  for (int i = 0; i < opts.roll_samples; ++i) {
    const int r = 2 + i % (g.rows - 4);
    const int c = 2 + (i / (g.rows - 4)) % (g.cols - 4);
    const double angle = 2.0 * M_PI * i / std::max(opts.roll_samples, 1);
    add(SampleKind::Roll,
        make_motion_trajectory(g.point2(g.index(r, c)), kSynthPunchHalfHeight,
                               6e-4, MotionKind::Roll,
                               Vec2(std::cos(angle), std::sin(angle)), 0.04,
                               opts.press_steps, opts.motion_steps, opts.dt));
  }

  // Slip: long slides (4 mm at 1 mm depth) that saturate the friction cone
  // for any mu below slide/depth.
  for (int i = 0; i < opts.slip_samples; ++i) {
    const int r = 2 + i % (g.rows - 4);
    const int c = 3 + (i / (g.rows - 4)) % (g.cols - 6);
    const double angle = 2.0 * M_PI * i / std::max(opts.slip_samples, 1);
    add(SampleKind::Slip,
        make_motion_trajectory(g.point2(g.index(r, c)), kSynthPunchHalfHeight,
                               1e-3, MotionKind::Slide,
                               Vec2(std::cos(angle), std::sin(angle)), 4e-3,
                               opts.press_steps, opts.motion_steps, opts.dt));
  }

  if (opts.noise_px > 0.0) {
    std::normal_distribution<double> noise(0.0, opts.noise_px);
    for (CalibrationSample& s : samples)
      for (Vec2& v : s.observed.d) v += Vec2(noise(rng), noise(rng));
  }
  return samples;
}

}  // namespace tacshear
