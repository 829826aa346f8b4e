#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tacshear/calibration.hpp"
#include "tacshear/fots.hpp"
#include "tacshear/penalty.hpp"
#include "tacshear/sdf.hpp"
#include "tacshear/surface.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// Round-trippable decimal representation (17 significant digits).
std::string format_double(double v);

// Writes through a temporary file in the same directory and renames it into
// place, so readers never observe a half-written file.
void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer,
                       bool binary = false);

// ---------------------------------------------------------------------------
// Pose trajectories ("tacshear-trajectory v1"): one frame per line,
//   time qw qx qy qz tx ty tz
// with strictly increasing times and near-unit quaternions (renormalized on
// load).

std::vector<TimedPose> load_trajectory(const std::string& path);
void save_trajectory(const std::string& path,
                     const std::vector<TimedPose>& trajectory);

// ---------------------------------------------------------------------------
// Marker fields ("tacshear-field v1"): grid geometry and unit in the header,
// then one "x y dx dy" line per marker (row-major; x y is the rest position,
// validated against the grid on load), or a little-endian float32 payload
// when saved with a binary payload. Text payloads round-trip byte-identically.

struct FieldFile {
  MarkerField field;
  TactileGrid grid;
  PixelScale scale;
  std::string kind;  // optional free-form tag ("total", "shear", ...)
};

void save_field(const std::string& path, const MarkerField& field,
                const TactileGrid& grid, const PixelScale& scale,
                const std::string& kind = "", bool binary_payload = false);
FieldFile load_field(const std::string& path);

// ---------------------------------------------------------------------------
// Surface sample sets ("tacshear-surface v1"): one sample per line,
//   px py pz nx ny nz area

void save_surface(const std::string& path, const SurfaceSamples& samples);
SurfaceSamples load_surface(const std::string& path);

// ---------------------------------------------------------------------------
// Model parameters ("tacshear-params v1"): "key value" lines, defaults for
// missing keys, DataError on unknown keys.

struct AllParams {
  HydroParams hydro;
  FotsParams fots;
  PenaltyParams penalty;
  PixelScale scale;
};

void save_params(const std::string& path, const AllParams& params);
AllParams load_params(const std::string& path);

// Applies one "key value" assignment; shared by the params file loader and
// inline scenario overrides. Returns false for unrecognized keys.
bool apply_param_key(AllParams& params, const std::string& key,
                     const std::string& value);

// ---------------------------------------------------------------------------
// Scenario configuration ("tacshear-scenario v1"): the scene a simulation or
// benchmark runs in. Keys:
//   model      hydroelastic | fots_original | fots_reimpl | penalty
//   indenter   sphere r | box hx hy hz | cylinder r half_h | torus R r |
//              mesh path [cell] | sdf path
//   samples    surface sample count
//   seed       surface sampling seed
//   grid       standard | <rows cols spacing_x spacing_y [plane_height]>
//   params     path of a parameter file (relative to the scenario file)
//   gravity    tx ty tz  (enables the gravity-augmented field)
//   max_substep_disp  meters
// plus any parameter-file key inline (applied after the params file).

enum class ModelKind { Hydroelastic, FotsOriginal, FotsReimpl, Penalty };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view text);

struct Scenario {
  ModelKind model = ModelKind::Hydroelastic;
  SdfPtr indenter;
  std::string indenter_desc = "sphere 0.0175";
  int surface_samples = 256;
  uint64_t seed = 0;
  TactileGrid grid;
  AllParams params;
  double max_substep_disp = 0.005;
  std::optional<Vec3> gravity;
};

Scenario load_scenario(const std::string& path);

// Builds the indenter SDF named by a scenario "indenter" value; exposed for
// the sample-surface command. Relative mesh/sdf paths resolve against
// base_dir.
SdfPtr make_indenter(const std::string& spec, const std::string& base_dir);

// ---------------------------------------------------------------------------
// Calibration datasets ("tacshear-dataset v1"): a manifest with one
//   sample <kind> <trajectory-file> <field-file>
// line per sample; file paths are relative to the manifest's directory.

struct DatasetFile {
  std::vector<CalibrationSample> samples;
  TactileGrid grid;
  PixelScale scale;
};

DatasetFile load_dataset(const std::string& manifest_path);
void save_dataset(const std::string& dir,
                  const std::vector<CalibrationSample>& samples,
                  const TactileGrid& grid, const PixelScale& scale);

}  // namespace tacshear
