#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tacshear/hydroelastic.hpp"
#include "tacshear/surface.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// What kind of motion a recorded sample captures.  Dilation samples drive the
// lambda_d stage, shear samples the lambda_s and K stages, slip samples the mu
// stage; twist and roll samples are kept for model comparison.
enum class SampleKind { Dilation, Shear, Twist, Roll, Slip };

const char* to_string(SampleKind kind);
SampleKind sample_kind_from_string(std::string_view text);

// One recorded trajectory together with the marker field observed at its end.
// Observed fields are stored in pixels, the unit sensors report.
struct CalibrationSample {
  SampleKind kind = SampleKind::Dilation;
  std::vector<TimedPose> trajectory;
  MarkerField observed;
};

// Throws DataError if the trajectory is empty or not strictly increasing in
// time, or if the observed field does not match the grid.
void validate_sample(const CalibrationSample& sample, const TactileGrid& grid);

// Everything needed to re-simulate a sample: the scene minus the parameters
// being fitted.  `base` supplies the fields the staged procedure does not
// touch (E, and initial values for the fitted ones).
struct CalibrationSetup {
  SurfaceSamples surface;
  SdfPtr indenter;
  SdfPtr elastomer;
  TactileGrid grid;
  PixelScale scale;
  HydroParams base;
  double max_substep_disp = 0.005;
};

struct SearchBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct CalibrationOptions {
  SearchBracket lambda_bracket{1e2, 1e7};  // 1/m^2, shared by lambda_d/lambda_s
  SearchBracket k_bracket{10.0, 1e7};
  SearchBracket mu_bracket{0.01, 5.0};
  // Coarse log-spaced scan resolution before golden-section refinement.
  int coarse_points = 24;
  // Golden-section stopping width in log10(parameter) space.
  double log10_tol = 1e-4;
  // "In-contact" taxels for the rescaling step are those within this many
  // marker spacings of an in-contact surface point's anchor.
  double contact_mask_spacings = 1.5;
};

// Outcome of one scalar stage.
struct StageResult {
  double value = 0.0;     // fitted parameter
  double residual = 0.0;  // objective at `value`
  int evaluations = 0;
  bool flat_objective = false;  // objective constant over the bracket
  bool at_bracket_edge = false; // minimum pinned to a bracket endpoint
};

struct CalibrationResult {
  HydroParams params;
  StageResult lambda_d;
  StageResult lambda_s;
  StageResult k;
  StageResult mu;
  std::vector<std::string> warnings;

  bool degenerate() const;
};

// Stage selector for evaluating a single objective value, e.g. to grid-check
// a solver result.  `priors` supplies the already-fitted parameters the stage
// depends on (and E throughout).
enum class CalibrationStage { LambdaD, LambdaS, Stiffness, Friction };

double calibration_objective(CalibrationStage stage, double x,
                             const CalibrationSetup& setup,
                             const std::vector<CalibrationSample>& samples,
                             const HydroParams& priors,
                             const CalibrationOptions& opts = {});

// The four stages, in the order they must run.  Each consumes only samples of
// its kind: Dilation, Shear, Shear, Slip respectively.
StageResult calibrate_lambda_d(const CalibrationSetup& setup,
                               const std::vector<CalibrationSample>& samples,
                               const CalibrationOptions& opts = {});

StageResult calibrate_lambda_s(const CalibrationSetup& setup,
                               const std::vector<CalibrationSample>& samples,
                               double lambda_d_star,
                               const CalibrationOptions& opts = {});

StageResult calibrate_k(const CalibrationSetup& setup,
                        const std::vector<CalibrationSample>& samples,
                        double lambda_d_star, double lambda_s_star,
                        const CalibrationOptions& opts = {});

StageResult calibrate_mu(const CalibrationSetup& setup,
                         const std::vector<CalibrationSample>& samples,
                         const HydroParams& priors,
                         const CalibrationOptions& opts = {},
                         std::vector<std::string>* warnings = nullptr);

// Runs all four stages in order and assembles the fitted parameters.
CalibrationResult calibrate(const CalibrationSetup& setup,
                            const std::vector<CalibrationSample>& samples,
                            const CalibrationOptions& opts = {});

// Optional joint refinement of (lambda_s, K) on a small log-spaced grid
// centered on the staged result, using the raw (unrescaled) objective.  Kept
// separate because the staged procedure is the normative path.
void refine_shear_jointly(const CalibrationSetup& setup,
                          const std::vector<CalibrationSample>& samples,
                          CalibrationResult& result, int grid_points = 9,
                          double half_span_decades = 0.15,
                          const CalibrationOptions& opts = {});

}  // namespace tacshear
