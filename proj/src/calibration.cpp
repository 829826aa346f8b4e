#include "tacshear/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tacshear {

const char* to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::Dilation: return "dilation";
    case SampleKind::Shear: return "shear";
    case SampleKind::Twist: return "twist";
    case SampleKind::Roll: return "roll";
    case SampleKind::Slip: return "slip";
  }
  return "?";
}

SampleKind sample_kind_from_string(std::string_view text) {
  if (text == "dilation") return SampleKind::Dilation;
  if (text == "shear") return SampleKind::Shear;
  if (text == "twist") return SampleKind::Twist;
  if (text == "roll") return SampleKind::Roll;
  if (text == "slip") return SampleKind::Slip;
  throw DataError("unknown sample kind '" + std::string(text) +
                  "' (expected dilation, shear, twist, roll or slip)");
}

void validate_sample(const CalibrationSample& sample,
                     const TactileGrid& grid) {
  if (sample.trajectory.empty())
    throw DataError("calibration sample has an empty trajectory");
  for (size_t i = 1; i < sample.trajectory.size(); ++i)
    if (sample.trajectory[i].time_s <= sample.trajectory[i - 1].time_s)
      throw DataError("calibration trajectory times must strictly increase");
  if (sample.observed.rows != grid.rows || sample.observed.cols != grid.cols)
    throw DataError("observed field does not match the tactile grid");
}

bool CalibrationResult::degenerate() const {
  const auto bad = [](const StageResult& s) {
    return s.flat_objective || s.at_bracket_edge;
  };
  return bad(lambda_d) || bad(lambda_s) || bad(k) || bad(mu);
}

namespace {

std::vector<const CalibrationSample*> of_kind(
    const std::vector<CalibrationSample>& samples, SampleKind kind) {
  std::vector<const CalibrationSample*> out;
  for (const CalibrationSample& s : samples)
    if (s.kind == kind) out.push_back(&s);
  return out;
}

// Simulates one trajectory and returns the final total field in pixels,
// optionally exposing the final tracker state (for the contact mask) and
// accumulated step statistics.
MarkerField simulate_final_px(const CalibrationSetup& setup,
                              const HydroParams& params,
                              const std::vector<TimedPose>& trajectory,
                              TrackerState* state_out = nullptr,
                              StepStats* stats_out = nullptr) {
  const HydroelasticModel model(setup.surface, setup.indenter, setup.elastomer,
                                setup.grid, params, setup.max_substep_disp);
  TrackerState state = model.make_state(trajectory.front().pose);
  StepStats stats;
  for (size_t i = 1; i < trajectory.size(); ++i)
    stats.merge(model.step(state, trajectory[i].pose));
  const MarkerField total = model.total(state).to_pixels(setup.scale);
  if (state_out) *state_out = std::move(state);
  if (stats_out) *stats_out = stats;
  return total;
}

// Taxels within opts.contact_mask_spacings marker spacings of an in-contact
// point's drag anchor: the contact-region taxels used for rescaling.
std::vector<int> contact_mask(const CalibrationSetup& setup,
                              const TrackerState& state, double spacings) {
  const double radius =
      spacings * std::max(setup.grid.spacing_x, setup.grid.spacing_y);
  const double r2 = radius * radius;
  std::vector<int> mask;
  for (int i = 0; i < setup.grid.count(); ++i) {
    const Vec2 p = setup.grid.point2(i);
    for (int k = 0; k < state.count(); ++k) {
      if (!state.in_contact[k]) continue;
      const Vec3 anchor = state.prev_points[k] + state.offsets[k];
      if ((p - anchor.head<2>()).squaredNorm() <= r2) {
        mask.push_back(i);
        break;
      }
    }
  }
  return mask;
}

double mean_magnitude(const MarkerField& f, const std::vector<int>& mask) {
  if (mask.empty()) return 0.0;
  double sum = 0.0;
  for (int i : mask) sum += f.d[static_cast<size_t>(i)].norm();
  return sum / static_cast<double>(mask.size());
}

double squared_error(const MarkerField& a, const MarkerField& b,
                     double scale_a = 1.0) {
  double sum = 0.0;
  for (size_t i = 0; i < a.d.size(); ++i)
    sum += (scale_a * a.d[i] - b.d[i]).squaredNorm();
  return sum;
}

// Dilation-stage objective: the press field depends only on the final pose,
// so no trajectory integration is needed.
double objective_lambda_d(double lambda_d, const CalibrationSetup& setup,
                          const std::vector<const CalibrationSample*>& samples) {
  double total = 0.0;
  for (const CalibrationSample* s : samples) {
    const Pose& final_pose = s->trajectory.back().pose;
    const ContactSet contacts =
        find_contacts(setup.grid, *setup.indenter, final_pose);
    const MarkerField sim = dilation_field(setup.grid, contacts, lambda_d)
                                .to_pixels(setup.scale);
    total += squared_error(s->observed, sim);
  }
  return total;
}

// Shear-stage objective: full simulation at unit stiffness and stick-only
// friction, compared against the observation at matched magnitude (both
// fields brought to the same mean contact-region magnitude). The residual is
// evaluated at the observation's scale: scoring at the simulated scale would
// let a falloff steep enough to extinguish the simulated field fake a perfect
// fit, since both sides of the comparison would shrink with it.
double objective_lambda_s(double lambda_s, const CalibrationSetup& setup,
                          const std::vector<const CalibrationSample*>& samples,
                          double lambda_d_star, double mask_spacings,
                          bool* degenerate_mask = nullptr) {
  HydroParams params = setup.base;
  params.lambda_d = lambda_d_star;
  params.lambda_s = lambda_s;
  params.K = 1.0;
  params.mu = 1e5;
  params.mu_hat = 1e5;
  double total = 0.0;
  for (const CalibrationSample* s : samples) {
    TrackerState state;
    const MarkerField sim =
        simulate_final_px(setup, params, s->trajectory, &state);
    const std::vector<int> mask = contact_mask(setup, state, mask_spacings);
    if (mask.empty()) {
      if (degenerate_mask) *degenerate_mask = true;
      continue;
    }
    const double obs_mean = mean_magnitude(s->observed, mask);
    const double sim_mean = mean_magnitude(sim, mask);
    if (obs_mean <= 0.0 || sim_mean <= 0.0) {
      if (degenerate_mask) *degenerate_mask = true;
      continue;
    }
    total += squared_error(sim, s->observed, obs_mean / sim_mean);
  }
  return total;
}

double objective_k(double k, const CalibrationSetup& setup,
                   const std::vector<const CalibrationSample*>& samples,
                   double lambda_d_star, double lambda_s_star) {
  HydroParams params = setup.base;
  params.lambda_d = lambda_d_star;
  params.lambda_s = lambda_s_star;
  params.K = k;
  params.mu = 1e5;
  params.mu_hat = 1e5;
  double total = 0.0;
  for (const CalibrationSample* s : samples)
    total += squared_error(s->observed,
                           simulate_final_px(setup, params, s->trajectory));
  return total;
}

double objective_mu(double mu, const CalibrationSetup& setup,
                    const std::vector<const CalibrationSample*>& samples,
                    const HydroParams& priors, StepStats* stats_out = nullptr) {
  HydroParams params = priors;
  params.mu = mu;
  params.mu_hat = mu;
  double total = 0.0;
  StepStats all;
  for (const CalibrationSample* s : samples) {
    StepStats stats;
    total += squared_error(
        s->observed,
        simulate_final_px(setup, params, s->trajectory, nullptr, &stats));
    all.merge(stats);
  }
  if (stats_out) *stats_out = all;
  return total;
}

constexpr double kGolden = 0.61803398874989484820;

// Coarse log-spaced scan followed by golden-section refinement around the
// best coarse point. Tracks the best value ever evaluated, so the reported
// residual never exceeds any point the search visited.
template <typename F>
StageResult minimize_log(const F& objective, const SearchBracket& bracket,
                         int coarse_points, double log10_tol) {
  if (!(bracket.hi > bracket.lo) || !(bracket.lo > 0))
    throw DataError("search bracket must satisfy 0 < lo < hi");
  const int n = std::max(coarse_points, 3);
  const double ulo = std::log10(bracket.lo), uhi = std::log10(bracket.hi);

  StageResult result;
  double best_f = std::numeric_limits<double>::infinity();
  double best_u = ulo;
  const auto eval = [&](double u) {
    const double f = objective(std::pow(10.0, u));
    if (!std::isfinite(f))
      throw DegeneracyError("non-finite calibration residual");
    ++result.evaluations;
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
    return f;
  };

  std::vector<double> fs(static_cast<size_t>(n));
  int best_idx = 0;
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (int i = 0; i < n; ++i) {
    const double u = ulo + (uhi - ulo) * i / (n - 1);
    fs[static_cast<size_t>(i)] = eval(u);
    if (fs[static_cast<size_t>(i)] < fmin) {
      fmin = fs[static_cast<size_t>(i)];
      best_idx = i;
    }
    fmax = std::max(fmax, fs[static_cast<size_t>(i)]);
  }

  if (fmax - fmin <= 1e-12 * (std::abs(fmax) + std::abs(fmin) + 1e-300)) {
    result.flat_objective = true;
    result.value = std::pow(10.0, 0.5 * (ulo + uhi));  // geometric midpoint
    result.residual = fmin;
    return result;
  }
  if (best_idx == 0 || best_idx == n - 1) result.at_bracket_edge = true;

  const double step = (uhi - ulo) / (n - 1);
  double a = ulo + step * std::max(0, best_idx - 1);
  double b = ulo + step * std::min(n - 1, best_idx + 1);
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a > log10_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = eval(x2);
    }
  }

  result.value = std::pow(10.0, best_u);
  result.residual = best_f;
  if (best_u - ulo <= log10_tol || uhi - best_u <= log10_tol)
    result.at_bracket_edge = true;
  return result;
}

void require_samples(const std::vector<const CalibrationSample*>& samples,
                     SampleKind kind, const char* stage) {
  if (samples.empty())
    throw DataError(std::string("calibration stage '") + stage +
                    "' requires " + to_string(kind) +
                    " samples; the dataset has none");
}

}  // namespace

double calibration_objective(CalibrationStage stage, double x,
                             const CalibrationSetup& setup,
                             const std::vector<CalibrationSample>& samples,
                             const HydroParams& priors,
                             const CalibrationOptions& opts) {
  switch (stage) {
    case CalibrationStage::LambdaD:
      return objective_lambda_d(x, setup, of_kind(samples, SampleKind::Dilation));
    case CalibrationStage::LambdaS:
      return objective_lambda_s(x, setup, of_kind(samples, SampleKind::Shear),
                                priors.lambda_d, opts.contact_mask_spacings);
    case CalibrationStage::Stiffness:
      return objective_k(x, setup, of_kind(samples, SampleKind::Shear),
                         priors.lambda_d, priors.lambda_s);
    case CalibrationStage::Friction:
      return objective_mu(x, setup, of_kind(samples, SampleKind::Slip), priors);
  }
  throw DataError("unknown calibration stage");
}

StageResult calibrate_lambda_d(const CalibrationSetup& setup,
                               const std::vector<CalibrationSample>& samples,
                               const CalibrationOptions& opts) {
  const auto sel = of_kind(samples, SampleKind::Dilation);
  require_samples(sel, SampleKind::Dilation, "lambda_d");
  return minimize_log(
      [&](double x) { return objective_lambda_d(x, setup, sel); },
      opts.lambda_bracket, opts.coarse_points, opts.log10_tol);
}

StageResult calibrate_lambda_s(const CalibrationSetup& setup,
                               const std::vector<CalibrationSample>& samples,
                               double lambda_d_star,
                               const CalibrationOptions& opts) {
  const auto sel = of_kind(samples, SampleKind::Shear);
  require_samples(sel, SampleKind::Shear, "lambda_s");
  bool degenerate_mask = false;
  StageResult result = minimize_log(
      [&](double x) {
        return objective_lambda_s(x, setup, sel, lambda_d_star,
                                  opts.contact_mask_spacings, &degenerate_mask);
      },
      opts.lambda_bracket, opts.coarse_points, opts.log10_tol);
  if (degenerate_mask) result.flat_objective = true;
  return result;
}

StageResult calibrate_k(const CalibrationSetup& setup,
                        const std::vector<CalibrationSample>& samples,
                        double lambda_d_star, double lambda_s_star,
                        const CalibrationOptions& opts) {
  const auto sel = of_kind(samples, SampleKind::Shear);
  require_samples(sel, SampleKind::Shear, "K");
  return minimize_log(
      [&](double x) {
        return objective_k(x, setup, sel, lambda_d_star, lambda_s_star);
      },
      opts.k_bracket, opts.coarse_points, opts.log10_tol);
}

StageResult calibrate_mu(const CalibrationSetup& setup,
                         const std::vector<CalibrationSample>& samples,
                         const HydroParams& priors,
                         const CalibrationOptions& opts,
                         std::vector<std::string>* warnings) {
  const auto sel = of_kind(samples, SampleKind::Slip);
  require_samples(sel, SampleKind::Slip, "mu");
  StageResult result = minimize_log(
      [&](double x) { return objective_mu(x, setup, sel, priors); },
      opts.mu_bracket, opts.coarse_points, opts.log10_tol);

  // The friction cone must actually clip somewhere at the fitted value for
  // mu to be identified; re-run once at the solution to check.
  StepStats stats;
  objective_mu(result.value, setup, sel, priors, &stats);
  if (stats.force_clipped == 0 && stats.proj_clipped == 0) {
    if (warnings)
      warnings->push_back(
          "mu is unidentifiable: no friction-cone clipping occurred in the "
          "slip samples at the fitted value");
    result.flat_objective = true;
  }
  return result;
}

CalibrationResult calibrate(const CalibrationSetup& setup,
                            const std::vector<CalibrationSample>& samples,
                            const CalibrationOptions& opts) {
  for (const CalibrationSample& s : samples) validate_sample(s, setup.grid);

  CalibrationResult result;
  result.params = setup.base;

  result.lambda_d = calibrate_lambda_d(setup, samples, opts);
  result.params.lambda_d = result.lambda_d.value;

  result.lambda_s =
      calibrate_lambda_s(setup, samples, result.params.lambda_d, opts);
  result.params.lambda_s = result.lambda_s.value;

  result.k = calibrate_k(setup, samples, result.params.lambda_d,
                         result.params.lambda_s, opts);
  result.params.K = result.k.value;

  result.mu = calibrate_mu(setup, samples, result.params, opts,
                           &result.warnings);
  result.params.mu = result.mu.value;
  result.params.mu_hat = result.mu.value;
  return result;
}

void refine_shear_jointly(const CalibrationSetup& setup,
                          const std::vector<CalibrationSample>& samples,
                          CalibrationResult& result, int grid_points,
                          double half_span_decades,
                          const CalibrationOptions& opts) {
  const auto sel = of_kind(samples, SampleKind::Shear);
  require_samples(sel, SampleKind::Shear, "lambda_s/K joint refinement");
  const int n = std::max(grid_points, 3);
  const double ls0 = std::log10(result.params.lambda_s);
  const double lk0 = std::log10(result.params.K);

  double best = objective_k(result.params.K, setup, sel,
                            result.params.lambda_d, result.params.lambda_s);
  for (int i = 0; i < n; ++i) {
    const double ls =
        ls0 + half_span_decades * (2.0 * i / (n - 1) - 1.0);
    const double lambda_s =
        std::clamp(std::pow(10.0, ls), opts.lambda_bracket.lo,
                   opts.lambda_bracket.hi);
    for (int j = 0; j < n; ++j) {
      const double lk =
          lk0 + half_span_decades * (2.0 * j / (n - 1) - 1.0);
      const double k = std::clamp(std::pow(10.0, lk), opts.k_bracket.lo,
                                  opts.k_bracket.hi);
      const double f =
          objective_k(k, setup, sel, result.params.lambda_d, lambda_s);
      if (f < best) {
        best = f;
        result.params.lambda_s = lambda_s;
        result.params.K = k;
        result.lambda_s.value = lambda_s;
        result.k.value = k;
        result.k.residual = f;
      }
    }
  }
}

}  // namespace tacshear
