#include <random>

#include "doctest.h"
#include "tacshear/types.hpp"

using namespace tacshear;

namespace {

Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Pose p;
  p.q = Quat(g(rng), g(rng), g(rng), g(rng)).normalized();
  p.t = Vec3(g(rng), g(rng), g(rng)) * 0.01;
  return p;
}

}  // namespace

TEST_CASE("pose compose, inverse and apply behave as a rigid transform") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const Vec3 p(0.003, -0.001, 0.002);

    // compose applies the right factor first
    const Vec3 via_compose = a.compose(b).apply(p);
    const Vec3 via_chain = a.apply(b.apply(p));
    CHECK((via_compose - via_chain).norm() < 1e-15);

    // inverse round-trips points
    const Vec3 back = a.inverse().apply(a.apply(p));
    CHECK((back - p).norm() < 1e-15);

    // rotate ignores translation
    CHECK((a.rotate(p) - (a.apply(p) - a.t)).norm() < 1e-15);
  }
}

TEST_CASE("pose composition keeps the quaternion unit under long chains") {
  std::mt19937_64 rng(12);
  Pose acc;
  for (int i = 0; i < 10000; ++i) acc = acc.compose(random_pose(rng));
  CHECK(std::abs(acc.q.norm() - 1.0) < 1e-14);
}

TEST_CASE("pose interpolation hits its endpoints and splits translations") {
  Pose a, b;
  a.t = Vec3(1.0, 2.0, 3.0);
  b.t = Vec3(3.0, 0.0, -1.0);
  b.q = Quat(Eigen::AngleAxisd(0.8, Vec3::UnitZ()));

  CHECK((interpolate(a, b, 0.0).t - a.t).norm() == 0.0);
  CHECK((interpolate(a, b, 1.0).t - b.t).norm() == 0.0);
  CHECK(interpolate(a, b, 0.0).q.angularDistance(a.q) < 1e-15);
  CHECK(interpolate(a, b, 1.0).q.angularDistance(b.q) < 1e-15);

  const Pose mid = interpolate(a, b, 0.5);
  CHECK((mid.t - Vec3(2.0, 1.0, 1.0)).norm() < 1e-15);
  // slerp halves the rotation angle
  CHECK(mid.q.angularDistance(a.q) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("standard grid matches the sensor layout") {
  const TactileGrid g = TactileGrid::standard();
  CHECK(g.rows == 7);
  CHECK(g.cols == 9);
  CHECK(g.count() == 63);
  CHECK(g.spacing_x == doctest::Approx(0.065 / 9.0).epsilon(1e-15));
  CHECK(g.spacing_y == g.spacing_x);

  // markers are centered: the middle marker sits at the origin
  const Vec2 center = g.point2(g.index(3, 4));
  CHECK(center.norm() < 1e-15);

  // row-major indexing: advancing one column moves +x, one row moves +y
  CHECK(g.point2(g.index(0, 1)).x() - g.point2(g.index(0, 0)).x() ==
        doctest::Approx(g.spacing_x));
  CHECK(g.point2(g.index(1, 0)).y() - g.point2(g.index(0, 0)).y() ==
        doctest::Approx(g.spacing_y));
  CHECK(g.point3(5).z() == g.plane_height);
}

TEST_CASE("grid geometry comparison tolerates only tiny differences") {
  const TactileGrid a = TactileGrid::standard();
  TactileGrid b = a;
  CHECK(a.same_geometry(b));
  b.spacing_x += 1e-6;
  CHECK(!a.same_geometry(b));
  TactileGrid c = a;
  c.rows = 6;
  CHECK(!a.same_geometry(c));
}

TEST_CASE("pixel conversion uses the camera scale factor") {
  const PixelScale scale;
  CHECK(scale.px_per_m == doctest::Approx(1000.0 / 0.065).epsilon(1e-15));

  const TactileGrid g = TactileGrid::standard();
  MarkerField f = MarkerField::zeros(g);
  f.d[10] = Vec2(1e-3, -2e-3);
  const MarkerField px = f.to_pixels(scale);
  CHECK(px.unit == FieldUnit::Pixels);
  CHECK(px.d[10].x() == doctest::Approx(1e-3 * 1000.0 / 0.065).epsilon(1e-15));

  // converting an already-pixel field is the identity
  const MarkerField px2 = px.to_pixels(scale);
  CHECK(px2.d[10] == px.d[10]);

  const MarkerField back = px.to_meters(scale);
  CHECK(back.unit == FieldUnit::Meters);
  CHECK(back.d[10].x() == doctest::Approx(1e-3).epsilon(1e-14));
}

TEST_CASE("field addition is elementwise and grid-checked") {
  const TactileGrid g = TactileGrid::standard();
  MarkerField a = MarkerField::zeros(g);
  MarkerField b = MarkerField::zeros(g);
  a.d[0] = Vec2(1.0, 2.0);
  b.d[0] = Vec2(0.5, -1.0);
  b.d[62] = Vec2(3.0, 4.0);

  const MarkerField sum = a + b;
  CHECK(sum.d[0] == Vec2(1.5, 1.0));
  CHECK(sum.d[62] == Vec2(3.0, 4.0));
  CHECK(sum.max_norm() == doctest::Approx(5.0));

  MarkerField small(2, 2);
  CHECK_THROWS_AS(small += a, DataError);
}

TEST_CASE("compensated accumulation survives catastrophic cancellation") {
  KahanVec2 acc;
  acc.add(Vec2(1e16, 0.0));
  acc.add(Vec2(1.0, 0.0));
  acc.add(Vec2(-1e16, 0.0));
  CHECK(acc.total().x() == 1.0);

  double naive = 1e16;
  naive += 1.0;
  naive += -1e16;
  CHECK(naive == 0.0);  // the plain sum loses the 1.0
}

TEST_CASE("single-tracker consistency requires matched gains and friction") {
  HydroParams p = HydroParams::defaults();
  p.E = p.K;
  p.mu_hat = p.mu;
  CHECK(p.single_tracker_consistent());
  p.E = 2.0 * p.K;
  CHECK(!p.single_tracker_consistent());
  p.E = p.K;
  p.mu_hat = p.mu + 0.1;
  CHECK(!p.single_tracker_consistent());
}

TEST_CASE("error types are distinct and carry their message") {
  try {
    throw DataError("bad file");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "bad file");
  }
  CHECK_THROWS_AS(throw DegeneracyError("flat"), DegeneracyError);
  // DataError is not a DegeneracyError and vice versa
  bool caught_as_degeneracy = false;
  try {
    throw DataError("x");
  } catch (const DegeneracyError&) {
    caught_as_degeneracy = true;
  } catch (const DataError&) {
  }
  CHECK(!caught_as_degeneracy);
}
