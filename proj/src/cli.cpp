#include "tacshear/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tacshear/batch.hpp"
#include "tacshear/calibration.hpp"
#include "tacshear/io.hpp"
#include "tacshear/metrics.hpp"
#include "tacshear/synth.hpp"

namespace fs = std::filesystem;

namespace tacshear {
namespace {

SurfaceSamples scenario_surface(const Scenario& sc) {
  SampleOptions opts;
  opts.seed = sc.seed;
  return sample_surface(*sc.indenter, sc.surface_samples, opts);
}

SdfPtr pad_for(const TactileGrid& grid) {
  return std::make_shared<HalfspaceSdf>(
      HalfspaceSdf::xy_plane(grid.plane_height));
}

std::string step_file_name(size_t index) {
  char buf[40];  // fits "step_" + 20-digit size_t + ".field.txt"
  std::snprintf(buf, sizeof(buf), "step_%06zu.field.txt", index);
  return buf;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scenario_path;
  std::string trajectory_path;
  std::string out_dir;
  bool final_only = false;
  bool meters = false;
  bool binary = false;
};

int run_simulate(const SimulateArgs& args) {
  const Scenario sc = load_scenario(args.scenario_path);
  const std::vector<TimedPose> traj = load_trajectory(args.trajectory_path);
  fs::create_directories(args.out_dir);

  std::vector<MarkerField> fields;
  fields.reserve(traj.size());

  switch (sc.model) {
    case ModelKind::Hydroelastic: {
      const HydroelasticModel model(scenario_surface(sc), sc.indenter,
                                    pad_for(sc.grid), sc.grid,
                                    sc.params.hydro, sc.max_substep_disp);
      Pose gravity_xf;
      if (sc.gravity) gravity_xf.t = *sc.gravity;
      TrackerState state = model.make_state(traj.front().pose);
      const auto render = [&] {
        return sc.gravity ? model.gravity_augmented(state, gravity_xf)
                          : model.total(state);
      };
      fields.push_back(render());
      for (size_t i = 1; i < traj.size(); ++i) {
        model.step(state, traj[i].pose);
        fields.push_back(render());
      }
      break;
    }
    case ModelKind::FotsOriginal:
    case ModelKind::FotsReimpl: {
      FotsParams fp = sc.params.fots;
      fp.center_mode = sc.model == ModelKind::FotsOriginal
                           ? FotsParams::CenterMode::ObjectFrame
                           : FotsParams::CenterMode::InitialContactPatch;
      FotsSession session(fp, sc.grid, sc.indenter);
      for (const TimedPose& tp : traj)
        fields.push_back(session.step(tp.pose));
      break;
    }
    case ModelKind::Penalty: {
      for (size_t i = 0; i < traj.size(); ++i) {
        Vec3 angular = Vec3::Zero(), linear = Vec3::Zero();
        if (i > 0) {
          const double dt = traj[i].time_s - traj[i - 1].time_s;
          const Eigen::AngleAxisd aa(traj[i].pose.q *
                                     traj[i - 1].pose.q.conjugate());
          angular = aa.angle() * aa.axis() / dt;
          linear = (traj[i].pose.t - traj[i - 1].pose.t) / dt;
        }
        fields.push_back(penalty_field(sc.grid, *sc.indenter, traj[i].pose,
                                       angular, linear, sc.params.penalty));
      }
      break;
    }
  }

  const auto emit = [&](const std::string& name, const MarkerField& f) {
    const MarkerField out =
        args.meters ? f : f.to_pixels(sc.params.scale);
    save_field((fs::path(args.out_dir) / name).string(), out, sc.grid,
               sc.params.scale, "total", args.binary);
  };
  if (args.final_only) {
    emit("final.field.txt", fields.back());
  } else {
    for (size_t i = 0; i < fields.size(); ++i)
      emit(step_file_name(i), fields[i]);
  }
  std::cout << "simulated " << traj.size() << " frames with model "
            << to_string(sc.model) << "; final max displacement "
            << format_double(fields.back().max_norm()) << " "
            << (fields.back().unit == FieldUnit::Pixels ? "px" : "m") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string scenario_path;
  std::string dataset_path;
  std::string out_path;
  std::string report_path;
  std::string synth_truth_path;
  double noise_px = 0.0;
  uint64_t synth_seed = 20240814;
  bool refine_joint = false;
};

std::string stage_line(const char* name, const StageResult& s) {
  std::ostringstream out;
  out << "  " << name << " = " << format_double(s.value) << "  (residual "
      << format_double(s.residual) << ", " << s.evaluations << " evaluations";
  if (s.flat_objective) out << ", FLAT OBJECTIVE";
  if (s.at_bracket_edge) out << ", AT BRACKET EDGE";
  out << ")";
  return out.str();
}

int run_calibrate(const CalibrateArgs& args) {
  CalibrationSetup setup;
  AllParams out_params;

  std::string manifest = args.dataset_path;
  if (!args.synth_truth_path.empty()) {
    // Self-contained synthetic run: canonical punch setup, dataset written
    // into the --dataset directory for inspection and re-use.
    std::string dir = manifest;
    if (fs::path(dir).filename() == "manifest.txt")
      dir = fs::path(dir).parent_path().string();
    setup = make_synth_setup();
    HydroParams truth = load_params(args.synth_truth_path).hydro;
    truth.mu_hat = truth.mu;
    SynthOptions sopts;
    sopts.seed = args.synth_seed;
    sopts.noise_px = args.noise_px;
    const std::vector<CalibrationSample> samples =
        make_synth_dataset(setup, truth, sopts);
    save_dataset(dir, samples, setup.grid, setup.scale);
    manifest = (fs::path(dir) / "manifest.txt").string();
    std::cout << "wrote synthetic dataset (" << samples.size()
              << " samples) to " << dir << "\n";
  } else {
    if (fs::is_directory(manifest))
      manifest = (fs::path(manifest) / "manifest.txt").string();
    if (args.scenario_path.empty())
      throw DataError("calibrate needs --scenario (or --synth)");
    const Scenario sc = load_scenario(args.scenario_path);
    setup.indenter = sc.indenter;
    setup.surface = scenario_surface(sc);
    setup.elastomer = pad_for(sc.grid);
    setup.grid = sc.grid;
    setup.base = sc.params.hydro;
    setup.max_substep_disp = sc.max_substep_disp;
    out_params = sc.params;
  }

  const DatasetFile ds = load_dataset(manifest);
  if (!ds.grid.same_geometry(setup.grid))
    throw DataError("dataset grid does not match the scenario grid");
  setup.scale = ds.scale;

  CalibrationResult result = calibrate(setup, ds.samples);
  if (args.refine_joint) refine_shear_jointly(setup, ds.samples, result);

  out_params.hydro = result.params;
  out_params.scale = ds.scale;
  save_params(args.out_path, out_params);

  std::ostringstream report;
  report << "calibrated " << ds.samples.size() << " samples\n";
  report << stage_line("lambda_d", result.lambda_d) << "\n";
  report << stage_line("lambda_s", result.lambda_s) << "\n";
  report << stage_line("K", result.k) << "\n";
  report << stage_line("mu", result.mu) << "\n";
  for (const std::string& w : result.warnings)
    report << "  warning: " << w << "\n";
  std::cout << report.str();
  if (!args.report_path.empty())
    write_file_atomic(args.report_path,
                      [&](std::ostream& out) { out << report.str(); });
  std::cout << "wrote parameters to " << args.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::vector<std::string> pred_paths;
  std::vector<std::string> truth_paths;
  std::string out_path;
  std::string plot_dir;
  double floor_px = 0.3;
};

void write_field_svg(const std::string& path, const TactileGrid& grid,
                     const MarkerField& pred_px, const MarkerField& truth_px,
                     const std::string& title) {
  const double W = 640, H = 520, margin = 60;
  const double gx0 = grid.origin_x - grid.spacing_x;
  const double gy0 = grid.origin_y - grid.spacing_y;
  const double gw = (grid.cols + 1) * grid.spacing_x;
  const double gh = (grid.rows + 1) * grid.spacing_y;
  const double sxy = std::min((W - 2 * margin) / gw, (H - 2 * margin) / gh);
  const auto X = [&](double x) { return margin + (x - gx0) * sxy; };
  const auto Y = [&](double y) { return H - margin - (y - gy0) * sxy; };

  double max_px = 1e-12;
  for (const Vec2& v : pred_px.d) max_px = std::max(max_px, v.norm());
  for (const Vec2& v : truth_px.d) max_px = std::max(max_px, v.norm());
  const double arrow =
      0.9 * std::min(grid.spacing_x, grid.spacing_y) * sxy / max_px;

  write_file_atomic(path, [&](std::ostream& out) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"20\" y=\"28\" font-family=\"monospace\" font-size=\"15\">"
        << title << "</text>\n";
    out << "<text x=\"20\" y=\"46\" font-family=\"monospace\" font-size=\"12\" "
           "fill=\"#1b9e77\">truth</text>\n";
    out << "<text x=\"70\" y=\"46\" font-family=\"monospace\" font-size=\"12\" "
           "fill=\"#d95f02\">predicted</text>\n";
    const auto arrows = [&](const MarkerField& f, const char* color) {
      for (int i = 0; i < f.count(); ++i) {
        const Vec2 p = grid.point2(i);
        const double x0 = X(p.x()), y0 = Y(p.y());
        const double x1 = x0 + f.d[static_cast<size_t>(i)].x() * arrow;
        const double y1 = y0 - f.d[static_cast<size_t>(i)].y() * arrow;
        out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1
            << "\" y2=\"" << y1 << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<circle cx=\"" << x0 << "\" cy=\"" << y0
            << "\" r=\"1.6\" fill=\"#888\"/>\n";
        // arrow head: a dot at the tip keeps the svg tiny
        out << "<circle cx=\"" << x1 << "\" cy=\"" << y1 << "\" r=\"2.2\" "
            << "fill=\"" << color << "\"/>\n";
      }
    };
    arrows(truth_px, "#1b9e77");
    arrows(pred_px, "#d95f02");
    out << "</svg>\n";
  });
}

int run_compare(const CompareArgs& args) {
  if (args.pred_paths.empty() ||
      args.pred_paths.size() != args.truth_paths.size())
    throw DataError("compare needs matching --pred and --truth file lists");

  struct Group {
    double sq_sum = 0.0;
    size_t taxels = 0;
    double cos_sum = 0.0;
    size_t cos_taxels = 0;
  };
  std::map<std::string, Group> groups;
  Group overall;
  std::ostringstream report;
  report << "pair metrics (floor " << format_double(args.floor_px)
         << " px):\n";

  if (!args.plot_dir.empty()) fs::create_directories(args.plot_dir);

  for (size_t i = 0; i < args.pred_paths.size(); ++i) {
    const FieldFile pred = load_field(args.pred_paths[i]);
    const FieldFile truth = load_field(args.truth_paths[i]);
    if (!pred.grid.same_geometry(truth.grid))
      throw DataError("compare: grids differ between " + args.pred_paths[i] +
                      " and " + args.truth_paths[i]);
    const MarkerField pred_px = pred.field.to_pixels(pred.scale);
    const MarkerField truth_px = truth.field.to_pixels(truth.scale);

    const double rmse = rmse_px(pred_px, truth_px, pred.scale);
    const CosineResult cs = cosine_similarity(pred_px, truth_px, pred.scale,
                                              args.floor_px);
    const std::string kind = pred.kind.empty() ? "ungrouped" : pred.kind;
    Group& g = groups[kind];
    for (size_t t = 0; t < pred_px.d.size(); ++t) {
      const double sq = (pred_px.d[t] - truth_px.d[t]).squaredNorm();
      g.sq_sum += sq;
      overall.sq_sum += sq;
      const double np = pred_px.d[t].norm(), nt = truth_px.d[t].norm();
      if (np > args.floor_px && nt > args.floor_px) {
        const double c = pred_px.d[t].dot(truth_px.d[t]) / (np * nt);
        g.cos_sum += c;
        ++g.cos_taxels;
        overall.cos_sum += c;
        ++overall.cos_taxels;
      }
    }
    g.taxels += pred_px.d.size();
    overall.taxels += pred_px.d.size();

    report << "  " << args.pred_paths[i] << " vs " << args.truth_paths[i]
           << ": rmse " << format_double(rmse) << " px, cs "
           << (cs.defined() ? format_double(cs.value) : "undefined") << " ("
           << cs.taxels << " taxels)\n";

    if (!args.plot_dir.empty()) {
      char name[48];
      std::snprintf(name, sizeof(name), "pair_%03zu.svg", i);
      write_field_svg((fs::path(args.plot_dir) / name).string(), pred.grid,
                      pred_px, truth_px,
                      kind + ": " + fs::path(args.pred_paths[i])
                                        .filename()
                                        .string());
    }
  }

  const auto group_line = [&](const std::string& name, const Group& g) {
    report << "  " << name << ": rmse "
           << format_double(std::sqrt(g.sq_sum / static_cast<double>(g.taxels)))
           << " px, cs "
           << (g.cos_taxels > 0
                   ? format_double(g.cos_sum /
                                   static_cast<double>(g.cos_taxels))
                   : "undefined")
           << " (" << g.cos_taxels << " taxels)\n";
  };
  report << "per-kind:\n";
  for (const auto& [name, g] : groups) group_line(name, g);
  report << "overall:\n";
  group_line("all", overall);

  std::cout << report.str();
  if (!args.out_path.empty())
    write_file_atomic(args.out_path,
                      [&](std::ostream& out) { out << report.str(); });
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string scenario_path;
  std::vector<int> env_counts{256, 512, 1024};
  int steps = 20;
  int warmup = 5;
  int threads = 0;
  bool all_models = false;
  std::string out_path;
};

BatchConfig bench_config(const Scenario& sc, int threads) {
  BatchConfig cfg;
  cfg.model = sc.model;
  cfg.indenter = sc.indenter;
  cfg.elastomer = pad_for(sc.grid);
  cfg.surface = scenario_surface(sc);
  cfg.grid = sc.grid;
  cfg.params = sc.params;
  cfg.max_substep_disp = sc.max_substep_disp;
  cfg.threads = threads;
  return cfg;
}

int run_bench(const BenchArgs& args) {
  const Scenario sc = load_scenario(args.scenario_path);
  BatchConfig cfg = bench_config(sc, args.threads);

  std::vector<ModelKind> models;
  if (args.all_models)
    models = {ModelKind::Hydroelastic, ModelKind::FotsOriginal,
              ModelKind::FotsReimpl, ModelKind::Penalty};
  else
    models = {sc.model};

  std::vector<BenchReport> reports;
  for (ModelKind m : models) {
    cfg.model = m;
    reports.push_back(
        run_benchmark(cfg, args.env_counts, args.steps, args.warmup));
    std::cout << format_report(reports.back());
  }
  if (!args.out_path.empty()) save_report_csv(args.out_path, reports);
  return 0;
}

// ---------------------------------------------------------------------------
// sample-surface

struct SampleArgs {
  std::string indenter_spec;
  std::string scenario_path;
  int count = 256;
  uint64_t seed = 0;
  std::string out_path;
};

int run_sample_surface(const SampleArgs& args) {
  SdfPtr sdf;
  if (!args.indenter_spec.empty()) {
    sdf = make_indenter(args.indenter_spec, fs::current_path().string());
  } else if (!args.scenario_path.empty()) {
    sdf = load_scenario(args.scenario_path).indenter;
  } else {
    throw DataError("sample-surface needs --indenter or --scenario");
  }
  SampleOptions opts;
  opts.seed = args.seed;
  const SurfaceSamples samples = sample_surface(*sdf, args.count, opts);
  save_surface(args.out_path, samples);
  std::cout << "sampled " << samples.count() << " points, total area "
            << format_double(samples.total_area) << " m^2\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"tactile shear field simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "run a pose trajectory through a model and emit fields");
  c_sim->add_option("--scenario", sim.scenario_path, "scenario config file")
      ->envname("TACSHEAR_SCENARIO")
      ->required();
  c_sim->add_option("--trajectory", sim.trajectory_path, "trajectory file")
      ->required();
  c_sim->add_option("--out", sim.out_dir, "output directory")->required();
  c_sim->add_flag("--final-only", sim.final_only,
                  "emit only the final field");
  c_sim->add_flag("--meters", sim.meters, "emit fields in meters, not pixels");
  c_sim->add_flag("--binary", sim.binary, "float32 payloads");

  CalibrateArgs cal;
  CLI::App* c_cal = app.add_subcommand(
      "calibrate", "fit model parameters from a recorded dataset");
  c_cal->add_option("--scenario", cal.scenario_path, "scenario config file")
      ->envname("TACSHEAR_SCENARIO");
  c_cal->add_option("--dataset", cal.dataset_path,
                    "dataset manifest (or its directory)")
      ->required();
  c_cal->add_option("--out", cal.out_path, "output parameter file")
      ->required();
  c_cal->add_option("--report", cal.report_path, "stage report file");
  c_cal->add_option("--synth", cal.synth_truth_path,
                    "generate a synthetic dataset from this ground-truth "
                    "parameter file first (canonical punch setup)");
  c_cal->add_option("--synth-seed", cal.synth_seed, "synthetic dataset seed");
  c_cal->add_option("--noise-px", cal.noise_px,
                    "gaussian noise for --synth observations");
  c_cal->add_flag("--refine-joint", cal.refine_joint,
                  "joint lambda_s/K grid refinement after the staged fit");

  CompareArgs cmp;
  CLI::App* c_cmp = app.add_subcommand(
      "compare", "RMSE / cosine similarity between field files");
  c_cmp->add_option("--pred", cmp.pred_paths, "predicted field files")
      ->required();
  c_cmp->add_option("--truth", cmp.truth_paths, "ground-truth field files")
      ->required();
  c_cmp->add_option("--floor", cmp.floor_px,
                    "cosine-similarity magnitude floor in px");
  c_cmp->add_option("--out", cmp.out_path, "report file");
  c_cmp->add_option("--plot-dir", cmp.plot_dir,
                    "write vector-field overlays (svg) here");

  BenchArgs ben;
  CLI::App* c_ben = app.add_subcommand(
      "bench", "throughput benchmark over batched environments");
  c_ben->add_option("--scenario", ben.scenario_path, "scenario config file")
      ->envname("TACSHEAR_SCENARIO")
      ->required();
  c_ben->add_option("--envs", ben.env_counts, "environment counts");
  c_ben->add_option("--steps", ben.steps, "timed steps");
  c_ben->add_option("--warmup", ben.warmup, "warmup steps");
  c_ben->add_option("--threads", ben.threads, "worker threads (0 = auto)");
  c_ben->add_flag("--all-models", ben.all_models, "benchmark all four models");
  c_ben->add_option("--out", ben.out_path, "CSV records file");

  SampleArgs smp;
  CLI::App* c_smp = app.add_subcommand(
      "sample-surface", "sample surface points from an indenter SDF");
  c_smp->add_option("--indenter", smp.indenter_spec,
                    "indenter spec, e.g. 'sphere 0.0175'");
  c_smp->add_option("--scenario", smp.scenario_path,
                    "take the indenter from this scenario")
      ->envname("TACSHEAR_SCENARIO");
  c_smp->add_option("--count", smp.count, "sample count");
  c_smp->add_option("--seed", smp.seed, "sampling seed");
  c_smp->add_option("--out", smp.out_path, "output surface file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_cal->parsed()) return run_calibrate(cal);
    if (c_cmp->parsed()) return run_compare(cmp);
    if (c_ben->parsed()) return run_bench(ben);
    if (c_smp->parsed()) return run_sample_surface(smp);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const DegeneracyError& e) {
    std::cerr << "degeneracy: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace tacshear
