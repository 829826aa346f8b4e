#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tacshear/hydroelastic.hpp"

using namespace tacshear;

namespace {

constexpr double kRadius = 0.0175;

// Single tracked point at the bottom of the sphere: every tracker quantity
// has a closed form under press/slide motions.
SurfaceSamples bottom_point(double area) {
  SurfaceSamples s;
  s.points = {Vec3(0, 0, -kRadius)};
  s.normals = {Vec3(0, 0, -1)};
  s.areas = {area};
  s.total_area = area;
  return s;
}

HydroelasticModel make_model(const SurfaceSamples& surf, const HydroParams& p,
                             double max_substep = 0.05) {
  return HydroelasticModel(
      surf, std::make_shared<SphereSdf>(kRadius),
      std::make_shared<HalfspaceSdf>(HalfspaceSdf::xy_plane(0.0)),
      TactileGrid::standard(), p, max_substep);
}

Pose at_height(double z, double x = 0.0, double y = 0.0) {
  Pose p;
  p.t = Vec3(x, y, z);
  return p;
}

// Independent scalar re-implementation of the per-point recursion: project
// the in-contact displacement against the world normal, accumulate gains,
// floor the load, clip the tangential to the friction cone, reset on break.
struct OraclePoint {
  double load = 0.0;
  Vec3 tan = Vec3::Zero();
  bool in_contact = false;

  void step(const Vec3& o_prev, const Vec3& o_now, double phi_prev,
            double phi_now, const Vec3& n, double gain_n, double gain_t,
            double mu) {
    if (phi_now > 0.0) {
      load = 0.0;
      tan = Vec3::Zero();
      in_contact = false;
      return;
    }
    double alpha;
    if (phi_now == phi_prev) {
      alpha = phi_now < 0.0 ? 1.0 : 0.0;
    } else {
      const double relu_now = phi_now < 0.0 ? -phi_now : 0.0;
      const double relu_prev = phi_prev < 0.0 ? -phi_prev : 0.0;
      alpha = (relu_now - relu_prev) / (phi_prev - phi_now);
    }
    const Vec3 d = alpha * (o_now - o_prev);
    const double dn = d.dot(n);
    const Vec3 dt = d - dn * n;
    load = std::max(load + gain_n * dn, 0.0);
    tan -= gain_t * dt;
    const double cap = mu * load;
    if (tan.norm() > cap) tan *= cap / tan.norm();
    in_contact = true;
  }

  Vec3 vec(const Vec3& n) const { return -load * n + tan; }
};

}  // namespace

TEST_CASE("contact fraction covers all crossing cases") {
  CHECK(contact_fraction(-1.0, -2.0) == 1.0);   // fully inside
  CHECK(contact_fraction(2.0, 1.0) == 0.0);     // fully outside
  CHECK(contact_fraction(-3.0, 1.0) == doctest::Approx(0.75));  // entering
  CHECK(contact_fraction(3.0, -1.0) == doctest::Approx(0.25));  // exiting
  CHECK(contact_fraction(-0.5, -0.5) == 1.0);   // degenerate inside
  CHECK(contact_fraction(0.5, 0.5) == 0.0);     // degenerate outside
  CHECK(contact_fraction(0.0, 0.0) == 0.0);     // surface contact only
}

TEST_CASE("fresh state starts force-free and out of contact") {
  HydroParams p;
  const HydroelasticModel model = make_model(bottom_point(1e-5), p);
  const TrackerState st = model.make_state(at_height(kRadius + 1e-3));
  REQUIRE(st.count() == 1);
  CHECK(st.forces[0] == Vec3::Zero());
  CHECK(st.offsets[0] == Vec3::Zero());
  CHECK(!st.in_contact[0]);
  CHECK(st.prev_phi[0] == doctest::Approx(1e-3));
}

TEST_CASE("tracker recursion matches an independent scalar oracle") {
  HydroParams p;
  p.E = 1200.0;
  p.K = 700.0;
  p.mu = 0.5;
  p.mu_hat = 0.9;
  const double area = 2.5e-6;
  const HydroelasticModel model = make_model(bottom_point(area), p);

  // meandering press / slide / lift / re-press path
  std::vector<Pose> path = {at_height(kRadius + 5e-4)};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double z = kRadius + 5e-4, x = 0.0, y = 0.0;
  for (int i = 0; i < 120; ++i) {
    z += -2e-4 + 1.2e-4 * (u(rng) + (i > 80 ? 2.2 : 0.0));  // late lift-off
    x += 3e-4 * u(rng);
    y += 3e-4 * u(rng);
    path.push_back(at_height(z, x, y));
  }

  TrackerState st = model.make_state(path[0]);
  OraclePoint force_oracle, proj_oracle;
  Vec3 o_prev = path[0].apply(Vec3(0, 0, -kRadius));
  double phi_prev = o_prev.z();

  for (size_t i = 1; i < path.size(); ++i) {
    model.step(st, path[i]);
    const Vec3 o_now = path[i].apply(Vec3(0, 0, -kRadius));
    const double phi_now = o_now.z();
    const Vec3 n(0, 0, -1);  // identity rotations throughout
    force_oracle.step(o_prev, o_now, phi_prev, phi_now, n, p.E * area,
                      p.K * area, p.mu);
    proj_oracle.step(o_prev, o_now, phi_prev, phi_now, n, 1.0, 1.0, p.mu_hat);
    o_prev = o_now;
    phi_prev = phi_now;

    CHECK((st.forces[0] - force_oracle.vec(n)).norm() < 1e-12);
    CHECK((st.offsets[0] - proj_oracle.vec(n)).norm() < 1e-12);
    CHECK(static_cast<bool>(st.in_contact[0]) == force_oracle.in_contact);
  }
}

TEST_CASE("pure press accumulates the closed-form normal load") {
  HydroParams p;
  p.E = 1000.0;
  p.K = 800.0;
  const double area = 1e-5, pen = 1.2e-3;
  const HydroelasticModel model = make_model(bottom_point(area), p);

  TrackerState st = model.make_state(at_height(kRadius + 6e-4));
  for (int i = 1; i <= 10; ++i)
    model.step(st, at_height(kRadius + 6e-4 - i * (6e-4 + pen) / 10.0));

  const ForceDecomp f = model.decompose_force(st, 0);
  CHECK(f.normal == doctest::Approx(p.E * area * pen).epsilon(1e-12));
  CHECK(f.tangential.norm() == 0.0);  // no tangential motion ever happened

  const ForceDecomp o = model.decompose_offset(st, 0);
  CHECK(o.normal == doctest::Approx(pen).epsilon(1e-12));  // unit gains
}

TEST_CASE("sticking slide: tangential force grows, the anchor stays put") {
  HydroParams p;
  p.E = 1000.0;
  p.K = 800.0;
  p.mu = 2.0;   // wide cone: everything sticks
  p.mu_hat = 2.0;
  const double area = 1e-5, pen = 1e-3, slide = 8e-4;
  const HydroelasticModel model = make_model(bottom_point(area), p);

  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - pen));
  const Vec3 first_contact = st.prev_points[0] + st.offsets[0];
  for (int i = 1; i <= 16; ++i)
    model.step(st, at_height(kRadius - pen, i * slide / 16.0));

  const ForceDecomp f = model.decompose_force(st, 0);
  CHECK(f.tangential.norm() ==
        doctest::Approx(p.K * area * slide).epsilon(1e-12));
  // marker-drag direction follows the slide (+x)
  CHECK(-f.tangential.x() / f.tangential.norm() == doctest::Approx(1.0));

  // the drag anchor has not moved off the first-contact location
  const Vec3 anchor = st.prev_points[0] + st.offsets[0];
  CHECK((anchor - first_contact).norm() < 1e-9);
}

TEST_CASE("slipping slide rides the friction cone boundary exactly") {
  HydroParams p;
  p.E = 1000.0;
  p.K = 800.0;
  p.mu = 0.4;
  p.mu_hat = 0.4;
  const double area = 1e-5, pen = 1e-3;
  const HydroelasticModel model = make_model(bottom_point(area), p);

  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - pen));
  StepStats stats;
  for (int i = 1; i <= 20; ++i)
    stats.merge(model.step(st, at_height(kRadius - pen, i * 4e-3 / 20.0)));

  CHECK(stats.force_clipped > 0);
  const ForceDecomp f = model.decompose_force(st, 0);
  CHECK(f.tangential.norm() ==
        doctest::Approx(p.mu * f.normal).epsilon(1e-12));
  // projection tracker slips too: offset gap bounded by the saturated cone
  const ForceDecomp o = model.decompose_offset(st, 0);
  CHECK(o.tangential.norm() == doctest::Approx(p.mu_hat * pen).epsilon(1e-12));
}

TEST_CASE("breaking contact zeroes the trackers exactly") {
  HydroParams p;
  const HydroelasticModel model = make_model(bottom_point(1e-5), p);
  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - 1e-3));
  model.step(st, at_height(kRadius - 1e-3, 6e-4));
  REQUIRE(st.forces[0].norm() > 0.0);

  const StepStats stats = model.step(st, at_height(kRadius + 2e-3, 6e-4));
  CHECK(stats.resets == 1);
  CHECK(st.forces[0] == Vec3::Zero());   // exact zero, not merely small
  CHECK(st.offsets[0] == Vec3::Zero());
  CHECK(!st.in_contact[0]);

  // a second out-of-contact step does not count another reset
  CHECK(model.step(st, at_height(kRadius + 3e-3)).resets == 0);
}

TEST_CASE("large motions substep along the interpolated path") {
  HydroParams p;
  p.mu = 0.5;
  p.mu_hat = 0.5;
  const double max_substep = 5e-4;
  const HydroelasticModel guarded = make_model(bottom_point(1e-5), p, max_substep);
  const HydroelasticModel manual = make_model(bottom_point(1e-5), p, 1.0);

  const Pose start = at_height(kRadius - 1e-3);
  const Pose end = at_height(kRadius - 1e-3, 6e-3, -2e-3);

  TrackerState a = guarded.make_state(at_height(kRadius + 5e-4));
  guarded.step(a, start);
  TrackerState b = manual.make_state(at_height(kRadius + 5e-4));
  manual.step(b, start);

  const StepStats stats = guarded.step(a, end);
  const double dist = std::hypot(6e-3, 2e-3);
  CHECK(stats.substeps == static_cast<int>(std::ceil(dist / max_substep)));

  // replaying the same interpolated waypoints one at a time is bit-identical
  for (int k = 1; k <= stats.substeps; ++k)
    manual.step(b, k == stats.substeps
                       ? end
                       : interpolate(start, end,
                                     static_cast<double>(k) / stats.substeps));
  CHECK(a.forces[0] == b.forces[0]);
  CHECK(a.offsets[0] == b.offsets[0]);
}

TEST_CASE("non-finite poses are rejected as degenerate") {
  HydroParams p;
  const HydroelasticModel model = make_model(bottom_point(1e-5), p);
  TrackerState st = model.make_state(at_height(kRadius + 1e-3));
  Pose bad;
  bad.t = Vec3(0.0, 0.0, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(model.step(st, bad), DegeneracyError);
}

TEST_CASE("force decomposition reconstructs the stored vector") {
  HydroParams p;
  p.mu = 0.6;
  p.mu_hat = 0.6;
  const HydroelasticModel model = make_model(bottom_point(1e-5), p);
  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - 1e-3));
  model.step(st, at_height(kRadius - 1e-3, 2e-3, 1e-3));

  const ForceDecomp f = model.decompose_force(st, 0);
  CHECK(f.normal >= 0.0);
  const Vec3 n = st.prev_pose.rotate(model.surface().normals[0]);
  CHECK(std::abs(f.tangential.dot(n)) < 1e-15);
  CHECK((( -f.normal * n + f.tangential) - st.forces[0]).norm() < 1e-15);
}

TEST_CASE("matched gains let forces be recovered from offsets alone") {
  HydroParams p;
  p.E = p.K = 900.0;
  p.mu = p.mu_hat = 0.7;
  REQUIRE(p.single_tracker_consistent());
  const double area = 3e-6;
  const HydroelasticModel model = make_model(bottom_point(area), p);

  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - 1e-3));
  for (int i = 1; i <= 12; ++i)
    model.step(st, at_height(kRadius - 1e-3, i * 3e-4, i * 1e-4));

  const std::vector<Vec3> recovered = recover_forces(st, p.K, area);
  REQUIRE(recovered.size() == 1);
  CHECK((recovered[0] - st.forces[0]).norm() <
        1e-9 * (st.forces[0].norm() + 1e-30));
}

TEST_CASE("shear field equals the one-term closed form") {
  HydroParams p;
  p.lambda_s = 4000.0;
  p.E = 1000.0;
  p.K = 800.0;
  p.mu = p.mu_hat = 2.0;
  const double area = 1e-5, pen = 1e-3, slide = 5e-4;
  const HydroelasticModel model = make_model(bottom_point(area), p);

  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - pen));
  model.step(st, at_height(kRadius - pen, slide));

  const MarkerField field = model.shear(st);
  const Vec3 anchor = st.prev_points[0] + st.offsets[0];
  const Vec2 motion(p.K * area * slide, 0.0);  // minus the tangential force
  const TactileGrid& g = model.grid();
  for (int i = 0; i < g.count(); ++i) {
    const Vec2 v = g.point2(i) - Vec2(anchor.x(), anchor.y());
    const Vec2 expect =
        pen * motion * std::exp(-p.lambda_s * v.squaredNorm());
    CHECK((field.d[i] - expect).norm() < 1e-12 * (expect.norm() + 1.0));
  }

  // with no contact the shear field is identically zero
  TrackerState fresh = model.make_state(at_height(kRadius + 5e-4));
  CHECK(model.shear(fresh).max_norm() == 0.0);
}

TEST_CASE("total field is the elementwise sum of dilation and shear") {
  HydroParams p;
  const SurfaceSamples surf = bottom_point(1e-5);
  const HydroelasticModel model = make_model(surf, p);
  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - 1.5e-3));
  model.step(st, at_height(kRadius - 1.5e-3, 4e-4));

  const MarkerField total = model.total(st);
  const MarkerField parts = model.dilation(st.prev_pose) + model.shear(st);
  for (int i = 0; i < total.count(); ++i) CHECK(total.d[i] == parts.d[i]);
}

TEST_CASE("gravity-augmented field leaves the tracker untouched") {
  HydroParams p;
  p.mu = 0.5;
  p.mu_hat = 0.5;
  const HydroelasticModel model = make_model(bottom_point(1e-5), p);
  TrackerState st = model.make_state(at_height(kRadius + 5e-4));
  model.step(st, at_height(kRadius - 1e-3));
  model.step(st, at_height(kRadius - 1e-3, 3e-4));

  const TrackerState before = st;  // deep copy
  Pose gravity;
  gravity.t = Vec3(0, 0, -2e-4);

  const MarkerField aug = model.gravity_augmented(st, gravity);

  CHECK(st.forces[0] == before.forces[0]);
  CHECK(st.offsets[0] == before.offsets[0]);
  CHECK(st.prev_points[0] == before.prev_points[0]);
  CHECK(st.prev_phi[0] == before.prev_phi[0]);
  CHECK(st.in_contact[0] == before.in_contact[0]);
  CHECK(st.step_index == before.step_index);

  // equals the clone-and-step oracle
  TrackerState clone = before;
  model.step(clone, gravity.compose(before.prev_pose));
  const MarkerField expect = model.shear(clone);
  for (int i = 0; i < aug.count(); ++i)
    CHECK((aug.d[i] - expect.d[i]).norm() < 1e-12 * (expect.d[i].norm() + 1.0));
}

TEST_CASE("a closed slide loop leaves residual shear only when slipping") {
  const double area = 1e-5, pen = 1e-3;

  const auto run_loop = [&](double mu) {
    HydroParams p;
    p.mu = mu;
    p.mu_hat = mu;
    const HydroelasticModel model = make_model(bottom_point(area), p);
    TrackerState st = model.make_state(at_height(kRadius + 5e-4));
    model.step(st, at_height(kRadius - pen));
    const Vec3 pressed_force = st.forces[0];
    for (int i = 1; i <= 10; ++i)
      model.step(st, at_height(kRadius - pen, i * 4e-4));
    for (int i = 9; i >= 0; --i)
      model.step(st, at_height(kRadius - pen, i * 4e-4));
    return std::make_pair((st.forces[0] - pressed_force).norm(),
                          model.decompose_force(st, 0));
  };

  // elastic regime: the cone never clips, the loop is reversible
  const auto elastic = run_loop(1e5);
  CHECK(elastic.first < 1e-8);

  // slipping regime: the outbound clip loses force that never comes back
  const auto slipping = run_loop(0.2);
  CHECK(slipping.first > 1e-7);
  CHECK(slipping.second.tangential.norm() > 0.0);
}
