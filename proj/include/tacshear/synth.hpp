#pragma once

#include <cstdint>
#include <vector>

#include "tacshear/calibration.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// Simple pose-trajectory builders: descend vertically to `depth` below the
// pad surface over press_steps, then apply the motion over motion_steps.
// `bottom_offset` is the distance from the indenter origin to its lowest
// point, so the first frame hovers just above the pad.
enum class MotionKind { None, Slide, Twist, Roll };

std::vector<TimedPose> make_motion_trajectory(
    const Vec2& xy, double bottom_offset, double depth, MotionKind motion,
    const Vec2& direction, double magnitude, int press_steps,
    int motion_steps, double dt = 0.05, double start_clearance = 5e-4);

// Stand-in for a recorded calibration dataset: a flat-bottomed cylinder
// punch pressed, slid, twisted, rolled and slipped on the pad, with observed
// fields produced by the model itself at the given ground-truth parameters.
//
// The geometry is chosen so each stage of the calibration procedure sees
// exactly the signal it fits:
//  - presses land on marker positions, and a flat bottom produces zero
//    tangential drag, so dilation observations are pure dilation;
//  - shear and twist motions happen between markers, where the punch
//    footprint never covers one, so those observations carry no dilation;
//  - slip motions slide far beyond the friction cone so mu saturates.
struct SynthOptions {
  int dilation_samples = 10;
  int shear_samples = 10;
  int twist_samples = 4;
  int roll_samples = 4;
  int slip_samples = 6;
  int press_steps = 8;
  int motion_steps = 12;
  double dt = 0.05;
  double noise_px = 0.0;  // gaussian noise on observed fields
  uint64_t seed = 20240814;
};

// Punch radius 4.5 mm: smaller than the 5.1 mm clearance from a grid cell's
// center to its corner markers, larger than zero-coverage jitter needs.
constexpr double kSynthPunchRadius = 4.5e-3;
constexpr double kSynthPunchHalfHeight = 6.0e-3;

CalibrationSetup make_synth_setup(int surface_samples = 256,
                                  uint64_t surface_seed = 7);

// Observed fields are the simulated totals at `truth`, in pixels. For the
// slip stage to be exactly recoverable, pass truth with mu_hat == mu (the
// staged procedure fits a single friction coefficient).
std::vector<CalibrationSample> make_synth_dataset(
    const CalibrationSetup& setup, const HydroParams& truth,
    const SynthOptions& opts = {});

}  // namespace tacshear
