#include "tacshear/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fs = std::filesystem;

namespace tacshear {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer,
                       bool binary) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ios::openmode mode = std::ios::out | std::ios::trunc;
    if (binary) mode |= std::ios::binary;
    std::ofstream out(tmp, mode);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    writer(out);
    out.flush();
    if (!out.good()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DataError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot rename into place: " + path);
  }
}

namespace {

// Sequential text reader that knows its position for error messages. Blank
// lines and '#' comments are skipped in every text format.
struct Reader {
  std::string path;
  std::ifstream in;
  int line_no = 0;

  explicit Reader(const std::string& p, bool binary = false)
      : path(p), in(p, binary ? (std::ios::in | std::ios::binary)
                              : std::ios::in) {
    if (!in) throw DataError("cannot open: " + p);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  }

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      size_t i = line.find_first_not_of(" \t");
      if (i == std::string::npos || line[i] == '#') continue;
      return true;
    }
    return false;
  }

  std::string expect(const std::string& what) {
    std::string line;
    if (!next(line)) fail("unexpected end of file, expected " + what);
    return line;
  }
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const Reader& r, const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    r.fail("not a number: '" + tok + "'");
  return v;
}

double parse_finite(const Reader& r, const std::string& tok) {
  const double v = parse_double(r, tok);
  if (!std::isfinite(v)) r.fail("non-finite value: '" + tok + "'");
  return v;
}

long long parse_int(const Reader& r, const std::string& tok) {
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    r.fail("not an integer: '" + tok + "'");
  return v;
}

uint64_t parse_u64(const Reader& r, const std::string& tok) {
  uint64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    r.fail("not an unsigned integer: '" + tok + "'");
  return v;
}

void expect_header(Reader& r, const std::string& magic) {
  const std::string line = r.expect("header '" + magic + "'");
  if (line != magic) r.fail("expected header '" + magic + "', got '" + line + "'");
}

// Splits "key rest-of-line" at the first whitespace run.
bool split_key_value(const std::string& line, std::string& key,
                     std::string& value) {
  const size_t ks = line.find_first_not_of(" \t");
  if (ks == std::string::npos) return false;
  const size_t ke = line.find_first_of(" \t", ks);
  key = line.substr(ks, ke == std::string::npos ? std::string::npos : ke - ks);
  if (ke == std::string::npos) {
    value.clear();
    return true;
  }
  const size_t vs = line.find_first_not_of(" \t", ke);
  value = vs == std::string::npos ? std::string() : line.substr(vs);
  const size_t vend = value.find_last_not_of(" \t");
  if (vend != std::string::npos) value.erase(vend + 1);
  return true;
}

std::string resolve_relative(const std::string& spec,
                             const std::string& base_dir) {
  fs::path p(spec);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p.string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Trajectories

std::vector<TimedPose> load_trajectory(const std::string& path) {
  Reader r(path);
  expect_header(r, "tacshear-trajectory v1");
  const auto head = split_ws(r.expect("'frames N'"));
  if (head.size() != 2 || head[0] != "frames")
    r.fail("expected 'frames N'");
  const long long n = parse_int(r, head[1]);
  if (n < 1) r.fail("trajectory needs at least one frame");

  std::vector<TimedPose> traj;
  traj.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const auto tok = split_ws(r.expect("frame line"));
    if (tok.size() != 8)
      r.fail("expected 'time qw qx qy qz tx ty tz' (8 numbers)");
    TimedPose tp;
    tp.time_s = parse_finite(r, tok[0]);
    const double qw = parse_finite(r, tok[1]);
    const double qx = parse_finite(r, tok[2]);
    const double qy = parse_finite(r, tok[3]);
    const double qz = parse_finite(r, tok[4]);
    tp.pose.q = Quat(qw, qx, qy, qz);
    const double norm = tp.pose.q.norm();
    if (std::abs(norm - 1.0) > 1e-6)
      r.fail("quaternion norm " + format_double(norm) + " is not 1");
    tp.pose.q.normalize();
    tp.pose.t = Vec3(parse_finite(r, tok[5]), parse_finite(r, tok[6]),
                     parse_finite(r, tok[7]));
    if (!traj.empty() && tp.time_s <= traj.back().time_s)
      r.fail("times must be strictly increasing");
    traj.push_back(tp);
  }
  return traj;
}

void save_trajectory(const std::string& path,
                     const std::vector<TimedPose>& trajectory) {
  if (trajectory.empty()) throw DataError("refusing to save empty trajectory");
  write_file_atomic(path, [&](std::ostream& out) {
    out << "tacshear-trajectory v1\n";
    out << "frames " << trajectory.size() << "\n";
    for (const TimedPose& tp : trajectory) {
      out << format_double(tp.time_s) << ' ' << format_double(tp.pose.q.w())
          << ' ' << format_double(tp.pose.q.x()) << ' '
          << format_double(tp.pose.q.y()) << ' '
          << format_double(tp.pose.q.z()) << ' '
          << format_double(tp.pose.t.x()) << ' '
          << format_double(tp.pose.t.y()) << ' '
          << format_double(tp.pose.t.z()) << "\n";
    }
  });
}

// ---------------------------------------------------------------------------
// Marker fields

void save_field(const std::string& path, const MarkerField& field,
                const TactileGrid& grid, const PixelScale& scale,
                const std::string& kind, bool binary_payload) {
  if (field.rows != grid.rows || field.cols != grid.cols)
    throw DataError("field/grid size mismatch when saving " + path);
  write_file_atomic(
      path,
      [&](std::ostream& out) {
        out << "tacshear-field v1\n";
        out << "rows " << grid.rows << "\n";
        out << "cols " << grid.cols << "\n";
        out << "unit " << (field.unit == FieldUnit::Pixels ? "px" : "m")
            << "\n";
        out << "px_per_m " << format_double(scale.px_per_m) << "\n";
        out << "origin " << format_double(grid.origin_x) << ' '
            << format_double(grid.origin_y) << "\n";
        out << "spacing " << format_double(grid.spacing_x) << ' '
            << format_double(grid.spacing_y) << "\n";
        out << "plane_height " << format_double(grid.plane_height) << "\n";
        if (!kind.empty()) out << "kind " << kind << "\n";
        if (binary_payload) {
          out << "data binary_f32\n";
          std::vector<float> buf;
          buf.reserve(field.d.size() * 4);
          for (size_t i = 0; i < field.d.size(); ++i) {
            const Vec2 p = grid.point2(static_cast<int>(i));
            buf.push_back(static_cast<float>(p.x()));
            buf.push_back(static_cast<float>(p.y()));
            buf.push_back(static_cast<float>(field.d[i].x()));
            buf.push_back(static_cast<float>(field.d[i].y()));
          }
          out.write(reinterpret_cast<const char*>(buf.data()),
                    static_cast<std::streamsize>(buf.size() * sizeof(float)));
        } else {
          out << "data text\n";
          for (size_t i = 0; i < field.d.size(); ++i) {
            const Vec2 p = grid.point2(static_cast<int>(i));
            out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
                << format_double(field.d[i].x()) << ' '
                << format_double(field.d[i].y()) << "\n";
          }
        }
      },
      /*binary=*/true);
}

FieldFile load_field(const std::string& path) {
  Reader r(path, /*binary=*/true);
  expect_header(r, "tacshear-field v1");

  FieldFile f;
  TactileGrid& g = f.grid;
  g = TactileGrid{};
  bool have_rows = false, have_cols = false, have_unit = false;
  FieldUnit unit = FieldUnit::Meters;
  std::string payload;

  for (;;) {
    const std::string line = r.expect("'data text' or 'data binary_f32'");
    std::string key, value;
    if (!split_key_value(line, key, value)) continue;
    const auto tok = split_ws(value);
    if (key == "rows") {
      g.rows = static_cast<int>(parse_int(r, value));
      have_rows = true;
    } else if (key == "cols") {
      g.cols = static_cast<int>(parse_int(r, value));
      have_cols = true;
    } else if (key == "unit") {
      if (value == "px") unit = FieldUnit::Pixels;
      else if (value == "m") unit = FieldUnit::Meters;
      else r.fail("unit must be 'px' or 'm'");
      have_unit = true;
    } else if (key == "px_per_m") {
      f.scale.px_per_m = parse_finite(r, value);
    } else if (key == "origin") {
      if (tok.size() != 2) r.fail("origin needs 2 numbers");
      g.origin_x = parse_finite(r, tok[0]);
      g.origin_y = parse_finite(r, tok[1]);
    } else if (key == "spacing") {
      if (tok.size() != 2) r.fail("spacing needs 2 numbers");
      g.spacing_x = parse_finite(r, tok[0]);
      g.spacing_y = parse_finite(r, tok[1]);
    } else if (key == "plane_height") {
      g.plane_height = parse_finite(r, value);
    } else if (key == "kind") {
      f.kind = value;
    } else if (key == "data") {
      payload = value;
      break;
    } else {
      r.fail("unknown field key '" + key + "'");
    }
  }
  if (!have_rows || !have_cols || !have_unit)
    r.fail("field header must set rows, cols and unit");
  if (g.rows < 1 || g.cols < 1) r.fail("rows/cols must be positive");
  if (f.scale.px_per_m <= 0) r.fail("px_per_m must be positive");

  MarkerField field(g.rows, g.cols, unit);
  const size_t n = field.d.size();
  // Records carry the marker rest position for self-description; it must
  // agree with the header's grid geometry.
  const auto check_position = [&](size_t i, double x, double y, double tol) {
    const Vec2 expect = g.point2(static_cast<int>(i));
    if (std::abs(x - expect.x()) > tol || std::abs(y - expect.y()) > tol)
      r.fail("record position disagrees with the grid geometry");
  };
  if (payload == "text") {
    for (size_t i = 0; i < n; ++i) {
      const auto tok = split_ws(r.expect("field record line"));
      if (tok.size() != 4) r.fail("expected 'x y dx dy' (4 numbers)");
      check_position(i, parse_finite(r, tok[0]), parse_finite(r, tok[1]),
                     1e-9);
      field.d[i] = Vec2(parse_finite(r, tok[2]), parse_finite(r, tok[3]));
    }
  } else if (payload == "binary_f32") {
    std::vector<float> buf(n * 4);
    r.in.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (static_cast<size_t>(r.in.gcount()) != buf.size() * sizeof(float))
      r.fail("binary payload truncated");
    for (size_t i = 0; i < n; ++i) {
      const double dx = buf[4 * i + 2], dy = buf[4 * i + 3];
      if (!std::isfinite(dx) || !std::isfinite(dy))
        r.fail("non-finite value in binary payload");
      check_position(i, buf[4 * i], buf[4 * i + 1], 1e-5);  // f32 roundoff
      field.d[i] = Vec2(dx, dy);
    }
  } else {
    r.fail("data payload must be 'text' or 'binary_f32'");
  }
  f.field = std::move(field);
  return f;
}

// ---------------------------------------------------------------------------
// Surface sample sets

void save_surface(const std::string& path, const SurfaceSamples& samples) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "tacshear-surface v1\n";
    out << "count " << samples.count() << "\n";
    out << "total_area " << format_double(samples.total_area) << "\n";
    for (int i = 0; i < samples.count(); ++i) {
      const Vec3& p = samples.points[i];
      const Vec3& n = samples.normals[i];
      out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
          << format_double(p.z()) << ' ' << format_double(n.x()) << ' '
          << format_double(n.y()) << ' ' << format_double(n.z()) << ' '
          << format_double(samples.areas[i]) << "\n";
    }
  });
}

SurfaceSamples load_surface(const std::string& path) {
  Reader r(path);
  expect_header(r, "tacshear-surface v1");
  auto tok = split_ws(r.expect("'count N'"));
  if (tok.size() != 2 || tok[0] != "count") r.fail("expected 'count N'");
  const long long n = parse_int(r, tok[1]);
  if (n < 1) r.fail("surface sample count must be positive");
  tok = split_ws(r.expect("'total_area A'"));
  if (tok.size() != 2 || tok[0] != "total_area")
    r.fail("expected 'total_area A'");

  SurfaceSamples s;
  s.total_area = parse_finite(r, tok[1]);
  if (s.total_area <= 0) r.fail("total_area must be positive");
  s.points.reserve(static_cast<size_t>(n));
  s.normals.reserve(static_cast<size_t>(n));
  s.areas.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    tok = split_ws(r.expect("sample line"));
    if (tok.size() != 7)
      r.fail("expected 'px py pz nx ny nz area' (7 numbers)");
    s.points.emplace_back(parse_finite(r, tok[0]), parse_finite(r, tok[1]),
                          parse_finite(r, tok[2]));
    Vec3 normal(parse_finite(r, tok[3]), parse_finite(r, tok[4]),
                parse_finite(r, tok[5]));
    if (std::abs(normal.norm() - 1.0) > 1e-6)
      r.fail("normal is not unit length");
    s.normals.push_back(normal);
    const double a = parse_finite(r, tok[6]);
    if (a <= 0) r.fail("sample area must be positive");
    s.areas.push_back(a);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Parameters

bool apply_param_key(AllParams& p, const std::string& key,
                     const std::string& value) {
  const auto num = [&]() {
    double v = 0.0;
    const auto res =
        std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() ||
        !std::isfinite(v))
      throw DataError("parameter '" + key + "': bad number '" + value + "'");
    return v;
  };
  if (key == "lambda_d") p.hydro.lambda_d = num();
  else if (key == "lambda_s") p.hydro.lambda_s = num();
  else if (key == "K") p.hydro.K = num();
  else if (key == "E") p.hydro.E = num();
  else if (key == "mu") p.hydro.mu = num();
  else if (key == "mu_hat") p.hydro.mu_hat = num();
  else if (key == "fots_lambda_d") p.fots.lambda_d = num();
  else if (key == "fots_lambda_s") p.fots.lambda_s = num();
  else if (key == "fots_lambda_t") p.fots.lambda_t = num();
  else if (key == "fots_shear_max") p.fots.shear_max = num();
  else if (key == "fots_twist_max") p.fots.twist_max = num();
  else if (key == "fots_center") {
    if (value == "object_frame")
      p.fots.center_mode = FotsParams::CenterMode::ObjectFrame;
    else if (value == "initial_patch")
      p.fots.center_mode = FotsParams::CenterMode::InitialContactPatch;
    else
      throw DataError("fots_center must be 'object_frame' or 'initial_patch'");
  } else if (key == "penalty_k_n") p.penalty.k_n = num();
  else if (key == "penalty_k_t") p.penalty.k_t = num();
  else if (key == "penalty_mu") p.penalty.mu = num();
  else if (key == "px_per_m") {
    p.scale.px_per_m = num();
    if (p.scale.px_per_m <= 0)
      throw DataError("px_per_m must be positive");
  } else {
    return false;
  }
  return true;
}

void save_params(const std::string& path, const AllParams& p) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "tacshear-params v1\n";
    out << "lambda_d " << format_double(p.hydro.lambda_d) << "\n";
    out << "lambda_s " << format_double(p.hydro.lambda_s) << "\n";
    out << "K " << format_double(p.hydro.K) << "\n";
    out << "E " << format_double(p.hydro.E) << "\n";
    out << "mu " << format_double(p.hydro.mu) << "\n";
    out << "mu_hat " << format_double(p.hydro.mu_hat) << "\n";
    out << "fots_lambda_d " << format_double(p.fots.lambda_d) << "\n";
    out << "fots_lambda_s " << format_double(p.fots.lambda_s) << "\n";
    out << "fots_lambda_t " << format_double(p.fots.lambda_t) << "\n";
    out << "fots_shear_max " << format_double(p.fots.shear_max) << "\n";
    out << "fots_twist_max " << format_double(p.fots.twist_max) << "\n";
    out << "fots_center "
        << (p.fots.center_mode == FotsParams::CenterMode::ObjectFrame
                ? "object_frame"
                : "initial_patch")
        << "\n";
    out << "penalty_k_n " << format_double(p.penalty.k_n) << "\n";
    out << "penalty_k_t " << format_double(p.penalty.k_t) << "\n";
    out << "penalty_mu " << format_double(p.penalty.mu) << "\n";
    out << "px_per_m " << format_double(p.scale.px_per_m) << "\n";
  });
}

AllParams load_params(const std::string& path) {
  Reader r(path);
  expect_header(r, "tacshear-params v1");
  AllParams p;
  std::string line;
  while (r.next(line)) {
    std::string key, value;
    if (!split_key_value(line, key, value)) continue;
    try {
      if (!apply_param_key(p, key, value))
        r.fail("unknown parameter key '" + key + "'");
    } catch (const DataError& e) {
      r.fail(e.what());
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Scenarios

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Hydroelastic: return "hydroelastic";
    case ModelKind::FotsOriginal: return "fots_original";
    case ModelKind::FotsReimpl: return "fots_reimpl";
    case ModelKind::Penalty: return "penalty";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view text) {
  if (text == "hydroelastic") return ModelKind::Hydroelastic;
  if (text == "fots_original") return ModelKind::FotsOriginal;
  if (text == "fots_reimpl") return ModelKind::FotsReimpl;
  if (text == "penalty") return ModelKind::Penalty;
  throw DataError("unknown model '" + std::string(text) +
                  "' (expected hydroelastic, fots_original, fots_reimpl or "
                  "penalty)");
}

SdfPtr make_indenter(const std::string& spec, const std::string& base_dir) {
  const auto tok = split_ws(spec);
  const auto num = [&](size_t i) {
    double v = 0.0;
    const auto& s = tok[i];
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() ||
        !std::isfinite(v) || v <= 0)
      throw DataError("indenter '" + spec + "': bad dimension '" + s + "'");
    return v;
  };
  if (tok.empty()) throw DataError("empty indenter spec");
  const std::string& shape = tok[0];
  if (shape == "sphere" && tok.size() == 2)
    return std::make_shared<SphereSdf>(num(1));
  if (shape == "box" && tok.size() == 4)
    return std::make_shared<BoxSdf>(Vec3(num(1), num(2), num(3)));
  if (shape == "cylinder" && tok.size() == 3)
    return std::make_shared<CylinderSdf>(num(1), num(2));
  if (shape == "torus" && tok.size() == 3)
    return std::make_shared<TorusSdf>(num(1), num(2));
  if (shape == "mesh" && (tok.size() == 2 || tok.size() == 3)) {
    const std::string mesh_path = resolve_relative(tok[1], base_dir);
    const TriMesh mesh = load_stl_ascii(mesh_path);
    const Eigen::AlignedBox3d box = mesh.bounds();
    const double extent = box.sizes().maxCoeff();
    if (!(extent > 0)) throw DataError("mesh has no extent: " + mesh_path);
    const double cell = tok.size() == 3 ? num(2) : extent / 48.0;
    return std::make_shared<GridSdf>(GridSdf::from_mesh(mesh, cell, 3 * cell));
  }
  if (shape == "sdf" && tok.size() == 2)
    return std::make_shared<GridSdf>(
        GridSdf::load(resolve_relative(tok[1], base_dir)));
  throw DataError(
      "bad indenter spec '" + spec +
      "' (expected: sphere r | box hx hy hz | cylinder r half_h | "
      "torus R r | mesh path [cell] | sdf path)");
}

Scenario load_scenario(const std::string& path) {
  Reader r(path);
  expect_header(r, "tacshear-scenario v1");
  const std::string base_dir = fs::path(path).parent_path().string();

  Scenario sc;
  std::string indenter_spec = sc.indenter_desc;
  std::string line;
  while (r.next(line)) {
    std::string key, value;
    if (!split_key_value(line, key, value)) continue;
    const auto tok = split_ws(value);
    try {
      if (key == "model") {
        sc.model = model_kind_from_string(value);
      } else if (key == "indenter") {
        indenter_spec = value;
      } else if (key == "samples") {
        sc.surface_samples = static_cast<int>(parse_int(r, value));
        if (sc.surface_samples < 1) r.fail("samples must be positive");
      } else if (key == "seed") {
        sc.seed = parse_u64(r, value);
      } else if (key == "grid") {
        if (value == "standard") {
          sc.grid = TactileGrid::standard();
        } else if (tok.size() == 4 || tok.size() == 5) {
          sc.grid = TactileGrid::centered(
              static_cast<int>(parse_int(r, tok[0])),
              static_cast<int>(parse_int(r, tok[1])), parse_finite(r, tok[2]),
              parse_finite(r, tok[3]),
              tok.size() == 5 ? parse_finite(r, tok[4]) : 0.0);
        } else {
          r.fail("grid must be 'standard' or 'rows cols sx sy [plane_h]'");
        }
      } else if (key == "params") {
        sc.params = load_params(resolve_relative(value, base_dir));
      } else if (key == "gravity") {
        if (tok.size() != 3) r.fail("gravity needs 3 numbers");
        sc.gravity = Vec3(parse_finite(r, tok[0]), parse_finite(r, tok[1]),
                          parse_finite(r, tok[2]));
      } else if (key == "max_substep_disp") {
        sc.max_substep_disp = parse_finite(r, value);
        if (sc.max_substep_disp <= 0)
          r.fail("max_substep_disp must be positive");
      } else if (apply_param_key(sc.params, key, value)) {
        // inline parameter override
      } else {
        r.fail("unknown scenario key '" + key + "'");
      }
    } catch (const DataError& e) {
      const std::string msg = e.what();
      if (msg.find(path + ":") == 0) throw;  // already located
      r.fail(msg);
    }
  }
  sc.indenter_desc = indenter_spec;
  sc.indenter = make_indenter(indenter_spec, base_dir);
  return sc;
}

// ---------------------------------------------------------------------------
// Calibration datasets

DatasetFile load_dataset(const std::string& manifest_path) {
  Reader r(manifest_path);
  expect_header(r, "tacshear-dataset v1");
  const std::string base_dir = fs::path(manifest_path).parent_path().string();

  DatasetFile ds;
  bool first = true;
  std::string line;
  while (r.next(line)) {
    const auto tok = split_ws(line);
    if (tok.size() != 4 || tok[0] != "sample")
      r.fail("expected 'sample <kind> <trajectory-file> <field-file>'");
    CalibrationSample sample;
    try {
      sample.kind = sample_kind_from_string(tok[1]);
    } catch (const DataError& e) {
      r.fail(e.what());
    }
    sample.trajectory = load_trajectory(resolve_relative(tok[2], base_dir));
    FieldFile ff = load_field(resolve_relative(tok[3], base_dir));
    if (ff.field.unit != FieldUnit::Pixels)
      r.fail("observed fields must be in pixels: " + tok[3]);
    if (first) {
      ds.grid = ff.grid;
      ds.scale = ff.scale;
      first = false;
    } else {
      if (!ds.grid.same_geometry(ff.grid))
        r.fail("field grid differs from the dataset's first sample: " +
               tok[3]);
      if (std::abs(ff.scale.px_per_m - ds.scale.px_per_m) >
          1e-9 * ds.scale.px_per_m)
        r.fail("px_per_m differs from the dataset's first sample: " + tok[3]);
    }
    sample.observed = std::move(ff.field);
    validate_sample(sample, ds.grid);
    ds.samples.push_back(std::move(sample));
  }
  if (ds.samples.empty()) r.fail("dataset has no samples");
  return ds;
}

void save_dataset(const std::string& dir,
                  const std::vector<CalibrationSample>& samples,
                  const TactileGrid& grid, const PixelScale& scale) {
  if (samples.empty()) throw DataError("refusing to save empty dataset");
  fs::create_directories(dir);
  std::ostringstream manifest;
  manifest << "tacshear-dataset v1\n";
  for (size_t i = 0; i < samples.size(); ++i) {
    const CalibrationSample& s = samples[i];
    validate_sample(s, grid);
    if (s.observed.unit != FieldUnit::Pixels)
      throw DataError("observed fields must be in pixels");
    char stem[32];
    std::snprintf(stem, sizeof(stem), "sample_%03zu", i);
    const std::string traj_name = std::string(stem) + ".traj.txt";
    const std::string field_name = std::string(stem) + ".field.txt";
    save_trajectory((fs::path(dir) / traj_name).string(), s.trajectory);
    save_field((fs::path(dir) / field_name).string(), s.observed, grid, scale,
               to_string(s.kind));
    manifest << "sample " << to_string(s.kind) << ' ' << traj_name << ' '
             << field_name << "\n";
  }
  write_file_atomic((fs::path(dir) / "manifest.txt").string(),
                    [&](std::ostream& out) { out << manifest.str(); });
}

}  // namespace tacshear
