#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "tacshear/io.hpp"

using namespace tacshear;
namespace fs = std::filesystem;

namespace {

const std::string kWork = TEST_WORK_DIR;
const std::string kFixtures = TEST_FIXTURES_DIR;

std::string work_path(const std::string& name) {
  fs::create_directories(kWork);
  return (fs::path(kWork) / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<TimedPose> wiggle_trajectory(int frames) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TimedPose> out;
  for (int i = 0; i < frames; ++i) {
    TimedPose tp;
    tp.time_s = 0.05 * i + 1.0 / 3.0;
    tp.pose.q = Quat(Eigen::AngleAxisd(0.3 * u(rng), Vec3(u(rng), u(rng), u(rng)).normalized()));
    tp.pose.t = 1e-3 * Vec3(u(rng), u(rng), u(rng));
    out.push_back(tp);
  }
  return out;
}

MarkerField noisy_field(const TactileGrid& grid, uint64_t seed,
                        FieldUnit unit = FieldUnit::Meters) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MarkerField f = MarkerField::zeros(grid, unit);
  for (auto& d : f.d) d = Vec2(u(rng) / 3.0, u(rng) / 7.0);
  return f;
}

}  // namespace

TEST_CASE("format_double round-trips exactly through text") {
  // from_chars, not stod: stod raises out_of_range on subnormals like 5e-324
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 3.141592653589793, 1e17,
                   0.065 / 9.0, -0.0, 5e-324}) {
    const std::string text = format_double(v);
    double parsed = 0.0;
    const auto res =
        std::from_chars(text.data(), text.data() + text.size(), parsed);
    REQUIRE(res.ec == std::errc());
    CHECK(parsed == v);
  }
}

TEST_CASE("atomic writes land complete and leave no temp files behind") {
  const std::string dir = work_path("atomic");
  fs::create_directories(dir);
  const std::string target = dir + "/out.txt";
  write_file_atomic(target, [](std::ostream& o) { o << "hello\nworld\n"; });
  CHECK(slurp(target) == "hello\nworld\n");

  // overwrite through the same path
  write_file_atomic(target, [](std::ostream& o) { o << "second\n"; });
  CHECK(slurp(target) == "second\n");

  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("trajectories survive a save/load round trip") {
  const std::vector<TimedPose> traj = wiggle_trajectory(9);
  const std::string path = work_path("traj.txt");
  save_trajectory(path, traj);
  const std::vector<TimedPose> back = load_trajectory(path);
  REQUIRE(back.size() == traj.size());
  for (size_t i = 0; i < traj.size(); ++i) {
    CHECK(back[i].time_s == traj[i].time_s);  // 17 digits: bit-exact
    CHECK((back[i].pose.t - traj[i].pose.t).norm() == 0.0);
    // loader renormalizes, so allow an ulp of quaternion wiggle
    CHECK(back[i].pose.q.angularDistance(traj[i].pose.q) < 1e-14);
  }
  CHECK_THROWS_AS(save_trajectory(work_path("empty.txt"), {}), DataError);
}

TEST_CASE("trajectory loading rejects malformed files") {
  const auto write_raw = [&](const std::string& name, const std::string& body) {
    const std::string p = work_path(name);
    std::ofstream out(p);
    out << body;
    return p;
  };

  CHECK_THROWS_AS(load_trajectory(work_path("missing.txt")), DataError);
  CHECK_THROWS_AS(load_trajectory(write_raw(
                      "bad_header.txt", "tacshear-field v1\nframes 1\n")),
                  DataError);
  CHECK_THROWS_AS(
      load_trajectory(write_raw("bad_time.txt",
                                "tacshear-trajectory v1\nframes 2\n"
                                "0 1 0 0 0 0 0 0\n"
                                "0 1 0 0 0 0 0 1\n")),  // times not increasing
      DataError);
  CHECK_THROWS_AS(
      load_trajectory(write_raw("bad_quat.txt",
                                "tacshear-trajectory v1\nframes 1\n"
                                "0 2 0 0 0 0 0 0\n")),  // |q| far from 1
      DataError);
  CHECK_THROWS_AS(
      load_trajectory(write_raw("bad_token.txt",
                                "tacshear-trajectory v1\nframes 1\n"
                                "0 1 0 0 zero 0 0 0\n")),
      DataError);
}

TEST_CASE("text field files round-trip bit-exactly") {
  const TactileGrid grid = TactileGrid::standard();
  const PixelScale scale;
  const MarkerField f = noisy_field(grid, 21);
  const std::string path = work_path("field.txt");
  save_field(path, f, grid, scale, "total");

  const FieldFile back = load_field(path);
  CHECK(back.kind == "total");
  CHECK(back.grid.same_geometry(grid));
  CHECK(back.scale.px_per_m == scale.px_per_m);
  CHECK(back.field.unit == FieldUnit::Meters);
  REQUIRE(back.field.count() == f.count());
  for (int i = 0; i < f.count(); ++i) CHECK(back.field.d[i] == f.d[i]);

  // saving again from the loaded copy produces the same bytes
  const std::string path2 = work_path("field_again.txt");
  save_field(path2, back.field, back.grid, back.scale, back.kind);
  CHECK(slurp(path2) == slurp(path));
}

TEST_CASE("binary field payloads store float32 values") {
  const TactileGrid grid = TactileGrid::standard();
  const MarkerField f = noisy_field(grid, 22, FieldUnit::Pixels);
  const std::string path = work_path("field_bin.txt");
  save_field(path, f, grid, PixelScale{}, "shear", /*binary_payload=*/true);

  const FieldFile back = load_field(path);
  CHECK(back.field.unit == FieldUnit::Pixels);
  for (int i = 0; i < f.count(); ++i) {
    CHECK(back.field.d[i].x() == static_cast<double>(static_cast<float>(f.d[i].x())));
    CHECK(back.field.d[i].y() == static_cast<double>(static_cast<float>(f.d[i].y())));
  }
}

TEST_CASE("field loading validates the rest positions against the grid") {
  const TactileGrid grid = TactileGrid::standard();
  const std::string path = work_path("field_tamper.txt");
  save_field(path, noisy_field(grid, 23), grid, PixelScale{});

  // tamper with the first record's rest position
  std::string text = slurp(path);
  const size_t payload = text.find("data text\n");
  REQUIRE(payload != std::string::npos);
  const size_t line_start = payload + std::strlen("data text\n");
  const size_t line_end = text.find('\n', line_start);
  text.replace(line_start, line_end - line_start, "1 1 0 0");
  std::ofstream(path) << text;

  CHECK_THROWS_AS(load_field(path), DataError);
}

TEST_CASE("surface sample sets round-trip through text") {
  SampleOptions opts;
  opts.seed = 3;
  const SurfaceSamples s = sample_surface(SphereSdf(8e-3), 64, opts);
  const std::string path = work_path("surface.txt");
  save_surface(path, s);
  const SurfaceSamples back = load_surface(path);
  REQUIRE(back.count() == s.count());
  CHECK(back.total_area == s.total_area);
  for (int i = 0; i < s.count(); ++i) {
    CHECK(back.points[i] == s.points[i]);
    CHECK(back.normals[i] == s.normals[i]);
    CHECK(back.areas[i] == s.areas[i]);
  }
}

TEST_CASE("parameter files carry every tunable and reject unknown keys") {
  AllParams p;
  p.hydro.lambda_d = 12345.0;
  p.hydro.lambda_s = 678.0;
  p.hydro.K = 901.0;
  p.hydro.E = 1100.0;
  p.hydro.mu = 0.45;
  p.hydro.mu_hat = 0.55;
  p.fots.lambda_d = 9e3;
  p.fots.lambda_s = 5e3;
  p.fots.lambda_t = 6e3;
  p.fots.shear_max = 1.5e-3;
  p.fots.twist_max = 0.25;
  p.fots.center_mode = FotsParams::CenterMode::InitialContactPatch;
  p.penalty.k_n = 2e4;
  p.penalty.k_t = 3.0;
  p.penalty.mu = 0.9;
  p.scale.px_per_m = 12000.0;

  const std::string path = work_path("params.txt");
  save_params(path, p);
  const AllParams back = load_params(path);
  CHECK(back.hydro.lambda_d == p.hydro.lambda_d);
  CHECK(back.hydro.lambda_s == p.hydro.lambda_s);
  CHECK(back.hydro.K == p.hydro.K);
  CHECK(back.hydro.E == p.hydro.E);
  CHECK(back.hydro.mu == p.hydro.mu);
  CHECK(back.hydro.mu_hat == p.hydro.mu_hat);
  CHECK(back.fots.lambda_d == p.fots.lambda_d);
  CHECK(back.fots.lambda_s == p.fots.lambda_s);
  CHECK(back.fots.lambda_t == p.fots.lambda_t);
  CHECK(back.fots.shear_max == p.fots.shear_max);
  CHECK(back.fots.twist_max == p.fots.twist_max);
  CHECK(back.fots.center_mode == p.fots.center_mode);
  CHECK(back.penalty.k_n == p.penalty.k_n);
  CHECK(back.penalty.k_t == p.penalty.k_t);
  CHECK(back.penalty.mu == p.penalty.mu);
  CHECK(back.scale.px_per_m == p.scale.px_per_m);

  const std::string bad = work_path("params_bad.txt");
  std::ofstream(bad) << "tacshear-params v1\nyoung_modulus 3\n";
  CHECK_THROWS_AS(load_params(bad), DataError);
}

TEST_CASE("apply_param_key mutates known keys and flags unknown ones") {
  AllParams p;
  CHECK(apply_param_key(p, "K", "777"));
  CHECK(p.hydro.K == 777.0);
  CHECK(apply_param_key(p, "fots_center", "initial_patch"));
  CHECK(p.fots.center_mode == FotsParams::CenterMode::InitialContactPatch);
  CHECK(!apply_param_key(p, "not_a_key", "1"));
  CHECK_THROWS_AS(apply_param_key(p, "K", "sideways"), DataError);
}

TEST_CASE("scenario fixture loads with inline parameter overrides") {
  const Scenario sc = load_scenario(kFixtures + "/scenario_hydro.txt");
  CHECK(sc.model == ModelKind::Hydroelastic);
  CHECK(sc.indenter_desc == "sphere 0.0175");
  REQUIRE(sc.indenter);
  CHECK(sc.indenter->value(Vec3::Zero()) == doctest::Approx(-0.0175));
  CHECK(sc.surface_samples == 256);
  CHECK(sc.seed == 0);
  CHECK(sc.grid.same_geometry(TactileGrid::standard()));
  CHECK(sc.max_substep_disp == 0.005);
  CHECK(!sc.gravity.has_value());
  CHECK(sc.params.hydro.lambda_d == 10000.0);
  CHECK(sc.params.hydro.mu == 0.8);
}

TEST_CASE("scenarios can pull a params file and override it inline") {
  const std::string dir = work_path("scen");
  fs::create_directories(dir);
  std::ofstream(dir + "/scene.txt")
      << "tacshear-scenario v1\n"
      << "model fots_reimpl\n"
      << "indenter box 0.004 0.005 0.006\n"
      << "grid 5 5 0.007 0.007\n"
      << "params " << (fs::path(kFixtures) / "truth_params.txt").string()
      << "\n"
      << "gravity 0 0 -0.0002\n"
      << "mu 0.33\n";  // inline override applied after the params file

  const Scenario sc = load_scenario(dir + "/scene.txt");
  CHECK(sc.model == ModelKind::FotsReimpl);
  CHECK(sc.grid.rows == 5);
  CHECK(sc.grid.cols == 5);
  CHECK(sc.params.hydro.lambda_d == 12000.0);  // from the params file
  CHECK(sc.params.hydro.K == 800.0);
  CHECK(sc.params.hydro.mu == 0.33);  // inline wins
  REQUIRE(sc.gravity.has_value());
  CHECK((*sc.gravity - Vec3(0, 0, -2e-4)).norm() == 0.0);

  std::ofstream(dir + "/bad.txt") << "tacshear-scenario v1\nmodel warp9\n";
  CHECK_THROWS_AS(load_scenario(dir + "/bad.txt"), DataError);
}

TEST_CASE("indenter specs build the expected solids") {
  const std::string dir = work_path(".");
  const SdfPtr sphere = make_indenter("sphere 0.01", dir);
  CHECK(sphere->value(Vec3(0, 0, 0.01)) == doctest::Approx(0.0));
  const SdfPtr box = make_indenter("box 0.01 0.02 0.03", dir);
  CHECK(box->value(Vec3::Zero()) == doctest::Approx(-0.01));
  const SdfPtr cyl = make_indenter("cylinder 0.004 0.006", dir);
  CHECK(cyl->value(Vec3(0, 0, 0.006)) == doctest::Approx(0.0));
  const SdfPtr torus = make_indenter("torus 0.02 0.003", dir);
  CHECK(torus->value(Vec3(0.02, 0, 0)) == doctest::Approx(-0.003));

  CHECK_THROWS_AS(make_indenter("", dir), DataError);
  CHECK_THROWS_AS(make_indenter("dodecahedron 1", dir), DataError);
  CHECK_THROWS_AS(make_indenter("sphere -3", dir), DataError);
  CHECK_THROWS_AS(make_indenter("sphere", dir), DataError);
}

TEST_CASE("model kind names round-trip") {
  for (ModelKind kind : {ModelKind::Hydroelastic, ModelKind::FotsOriginal,
                         ModelKind::FotsReimpl, ModelKind::Penalty}) {
    CHECK(model_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(model_kind_from_string("holodeck"), DataError);
}

TEST_CASE("datasets save to a directory and load back intact") {
  const TactileGrid grid = TactileGrid::standard();
  const PixelScale scale;
  std::vector<CalibrationSample> samples;
  for (int k = 0; k < 3; ++k) {
    CalibrationSample s;
    s.kind = k == 0 ? SampleKind::Dilation
                    : (k == 1 ? SampleKind::Shear : SampleKind::Slip);
    s.trajectory = wiggle_trajectory(4 + k);
    s.observed = noisy_field(grid, 100 + k, FieldUnit::Pixels);
    samples.push_back(std::move(s));
  }

  const std::string dir = work_path("dataset");
  save_dataset(dir, samples, grid, scale);
  const DatasetFile back = load_dataset(dir + "/manifest.txt");
  REQUIRE(back.samples.size() == samples.size());
  CHECK(back.grid.same_geometry(grid));
  CHECK(back.scale.px_per_m == scale.px_per_m);
  for (size_t k = 0; k < samples.size(); ++k) {
    CHECK(back.samples[k].kind == samples[k].kind);
    REQUIRE(back.samples[k].trajectory.size() == samples[k].trajectory.size());
    for (int i = 0; i < back.samples[k].observed.count(); ++i)
      CHECK(back.samples[k].observed.d[i] == samples[k].observed.d[i]);
  }

  // meters-unit observations are rejected up front
  samples[0].observed = noisy_field(grid, 1, FieldUnit::Meters);
  CHECK_THROWS_AS(save_dataset(work_path("dataset_bad"), samples, grid, scale),
                  DataError);
}
