// Python bindings for the tactile shear simulator. Mirrors the C++ API:
// model classes, calibration, batching, metrics and the file formats.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tacshear/batch.hpp"
#include "tacshear/calibration.hpp"
#include "tacshear/cli.hpp"
#include "tacshear/dilation.hpp"
#include "tacshear/fots.hpp"
#include "tacshear/hydroelastic.hpp"
#include "tacshear/io.hpp"
#include "tacshear/metrics.hpp"
#include "tacshear/penalty.hpp"
#include "tacshear/sdf.hpp"
#include "tacshear/surface.hpp"
#include "tacshear/synth.hpp"
#include "tacshear/types.hpp"

namespace py = pybind11;
using namespace tacshear;

namespace {

Eigen::MatrixXd field_array(const MarkerField& f) {
  Eigen::MatrixXd out(f.count(), 2);
  for (int i = 0; i < f.count(); ++i) out.row(i) = f.d[static_cast<size_t>(i)];
  return out;
}

MarkerField field_from_array(int rows, int cols,
                             const Eigen::Ref<const Eigen::MatrixXd>& a,
                             FieldUnit unit) {
  if (a.rows() != static_cast<Eigen::Index>(rows) * cols || a.cols() != 2)
    throw DataError("field array must have shape (rows*cols, 2)");
  MarkerField f(rows, cols, unit);
  for (int i = 0; i < f.count(); ++i) f.d[static_cast<size_t>(i)] = a.row(i);
  return f;
}

}  // namespace

PYBIND11_MODULE(_tacshear, m) {
  m.doc() = "tactile shear field simulator";
  m.attr("__version__") = "0.1.0";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DegeneracyError>(m, "DegeneracyError",
                                          PyExc_ArithmeticError);

  // ---- core types ---------------------------------------------------------
  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init([](const Eigen::Vector4d& q, const Vec3& t) {
             Pose p;
             p.q = Quat(q[0], q[1], q[2], q[3]).normalized();
             p.t = t;
             return p;
           }),
           py::arg("q_wxyz"), py::arg("t"))
      .def_static("identity", &Pose::identity)
      .def_property(
          "q",
          [](const Pose& p) {
            return Eigen::Vector4d(p.q.w(), p.q.x(), p.q.y(), p.q.z());
          },
          [](Pose& p, const Eigen::Vector4d& q) {
            p.q = Quat(q[0], q[1], q[2], q[3]).normalized();
          },
          "unit quaternion as (w, x, y, z)")
      .def_readwrite("t", &Pose::t)
      .def("compose", &Pose::compose)
      .def("inverse", &Pose::inverse)
      .def("apply", &Pose::apply)
      .def("rotate", &Pose::rotate);

  m.def("interpolate", &interpolate, py::arg("a"), py::arg("b"), py::arg("s"));

  py::class_<TimedPose>(m, "TimedPose")
      .def(py::init<>())
      .def(py::init([](double t, const Pose& p) {
             return TimedPose{t, p};
           }),
           py::arg("time_s"), py::arg("pose"))
      .def_readwrite("time_s", &TimedPose::time_s)
      .def_readwrite("pose", &TimedPose::pose);

  py::class_<TactileGrid>(m, "TactileGrid")
      .def(py::init<>())
      .def_static("standard", &TactileGrid::standard)
      .def_static("centered", &TactileGrid::centered, py::arg("rows"),
                  py::arg("cols"), py::arg("spacing_x"), py::arg("spacing_y"),
                  py::arg("plane_height") = 0.0)
      .def_readwrite("rows", &TactileGrid::rows)
      .def_readwrite("cols", &TactileGrid::cols)
      .def_readwrite("spacing_x", &TactileGrid::spacing_x)
      .def_readwrite("spacing_y", &TactileGrid::spacing_y)
      .def_readwrite("origin_x", &TactileGrid::origin_x)
      .def_readwrite("origin_y", &TactileGrid::origin_y)
      .def_readwrite("plane_height", &TactileGrid::plane_height)
      .def("count", &TactileGrid::count)
      .def("index", &TactileGrid::index)
      .def("point2", &TactileGrid::point2)
      .def("point3", &TactileGrid::point3)
      .def("same_geometry", &TactileGrid::same_geometry, py::arg("other"),
           py::arg("tol") = 1e-12);

  py::enum_<FieldUnit>(m, "FieldUnit")
      .value("Meters", FieldUnit::Meters)
      .value("Pixels", FieldUnit::Pixels);

  py::class_<PixelScale>(m, "PixelScale")
      .def(py::init<>())
      .def(py::init([](double v) {
             PixelScale s;
             s.px_per_m = v;
             return s;
           }),
           py::arg("px_per_m"))
      .def_readwrite("px_per_m", &PixelScale::px_per_m);

  py::class_<MarkerField>(m, "MarkerField")
      .def(py::init<>())
      .def(py::init<int, int, FieldUnit>(), py::arg("rows"), py::arg("cols"),
           py::arg("unit") = FieldUnit::Meters)
      .def_static("zeros", &MarkerField::zeros, py::arg("grid"),
                  py::arg("unit") = FieldUnit::Meters)
      .def_static("from_array", &field_from_array, py::arg("rows"),
                  py::arg("cols"), py::arg("array"),
                  py::arg("unit") = FieldUnit::Meters)
      .def_readonly("rows", &MarkerField::rows)
      .def_readonly("cols", &MarkerField::cols)
      .def_readwrite("unit", &MarkerField::unit)
      .def_property_readonly("array", &field_array,
                             "(rows*cols, 2) displacement matrix, row-major")
      .def("count", &MarkerField::count)
      .def("to_pixels", &MarkerField::to_pixels)
      .def("to_meters", &MarkerField::to_meters)
      .def("max_norm", &MarkerField::max_norm);

  py::class_<HydroParams>(m, "HydroParams")
      .def(py::init<>())
      .def_readwrite("lambda_d", &HydroParams::lambda_d)
      .def_readwrite("lambda_s", &HydroParams::lambda_s)
      .def_readwrite("K", &HydroParams::K)
      .def_readwrite("E", &HydroParams::E)
      .def_readwrite("mu", &HydroParams::mu)
      .def_readwrite("mu_hat", &HydroParams::mu_hat)
      .def("single_tracker_consistent",
           &HydroParams::single_tracker_consistent);

  // ---- signed distance fields ---------------------------------------------
  py::class_<Sdf, std::shared_ptr<Sdf>>(m, "Sdf")
      .def("value", &Sdf::value)
      .def("gradient", &Sdf::gradient)
      .def("bounded", &Sdf::bounded)
      .def("surface_area", &Sdf::surface_area);

  py::class_<SphereSdf, Sdf, std::shared_ptr<SphereSdf>>(m, "SphereSdf")
      .def(py::init<double>(), py::arg("radius"))
      .def("radius", &SphereSdf::radius);
  py::class_<BoxSdf, Sdf, std::shared_ptr<BoxSdf>>(m, "BoxSdf")
      .def(py::init<const Vec3&>(), py::arg("half_extents"));
  py::class_<CylinderSdf, Sdf, std::shared_ptr<CylinderSdf>>(m, "CylinderSdf")
      .def(py::init<double, double>(), py::arg("radius"),
           py::arg("half_height"));
  py::class_<TorusSdf, Sdf, std::shared_ptr<TorusSdf>>(m, "TorusSdf")
      .def(py::init<double, double>(), py::arg("major_radius"),
           py::arg("tube_radius"));
  py::class_<HalfspaceSdf, Sdf, std::shared_ptr<HalfspaceSdf>>(m,
                                                               "HalfspaceSdf")
      .def(py::init<const Vec3&, double>(), py::arg("outward_normal"),
           py::arg("offset"))
      .def_static("xy_plane", &HalfspaceSdf::xy_plane,
                  py::arg("plane_height"));
  py::class_<GridSdf, Sdf, std::shared_ptr<GridSdf>>(m, "GridSdf")
      .def_static("from_sdf", &GridSdf::from_sdf, py::arg("sdf"),
                  py::arg("cell"), py::arg("margin"))
      .def_static("load", &GridSdf::load, py::arg("path"))
      .def("save", &GridSdf::save, py::arg("path"));

  m.def("make_indenter", &make_indenter, py::arg("spec"),
        py::arg("base_dir") = ".");

  // ---- surface sampling ----------------------------------------------------
  py::class_<SurfaceSamples>(m, "SurfaceSamples")
      .def(py::init<>())
      .def_readwrite("points", &SurfaceSamples::points)
      .def_readwrite("normals", &SurfaceSamples::normals)
      .def_readwrite("areas", &SurfaceSamples::areas)
      .def_readwrite("total_area", &SurfaceSamples::total_area)
      .def("count", &SurfaceSamples::count)
      .def("uniform_areas", &SurfaceSamples::uniform_areas,
           py::arg("rel_tol") = 1e-12);

  m.def(
      "sample_surface",
      [](const Sdf& sdf, int count, uint64_t seed) {
        SampleOptions opts;
        opts.seed = seed;
        return sample_surface(sdf, count, opts);
      },
      py::arg("sdf"), py::arg("count"), py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  // ---- contacts and dilation ------------------------------------------------
  py::class_<ContactSet>(m, "ContactSet")
      .def(py::init<>())
      .def_readwrite("idx", &ContactSet::idx)
      .def_readwrite("depth", &ContactSet::depth)
      .def("count", &ContactSet::count)
      .def("empty", &ContactSet::empty);

  m.def("find_contacts", &find_contacts, py::arg("grid"), py::arg("indenter"),
        py::arg("pose"));
  m.def("dilation_field", &dilation_field, py::arg("grid"),
        py::arg("contacts"), py::arg("lambda_d"));

  // ---- hydroelastic model ----------------------------------------------------
  py::class_<TrackerState>(m, "TrackerState")
      .def_readonly("forces", &TrackerState::forces)
      .def_readonly("offsets", &TrackerState::offsets)
      .def_readonly("prev_points", &TrackerState::prev_points)
      .def_readonly("prev_phi", &TrackerState::prev_phi)
      .def_readonly("in_contact", &TrackerState::in_contact)
      .def_readonly("step_index", &TrackerState::step_index)
      .def("count", &TrackerState::count);

  py::class_<StepStats>(m, "StepStats")
      .def_readonly("substeps", &StepStats::substeps)
      .def_readonly("force_clipped", &StepStats::force_clipped)
      .def_readonly("force_floored", &StepStats::force_floored)
      .def_readonly("proj_clipped", &StepStats::proj_clipped)
      .def_readonly("proj_floored", &StepStats::proj_floored)
      .def_readonly("resets", &StepStats::resets)
      .def_readonly("max_point_disp", &StepStats::max_point_disp);

  py::class_<ForceDecomp>(m, "ForceDecomp")
      .def_readonly("normal", &ForceDecomp::normal)
      .def_readonly("tangential", &ForceDecomp::tangential);

  py::class_<HydroelasticModel>(m, "HydroelasticModel")
      .def(py::init<SurfaceSamples, SdfPtr, SdfPtr, TactileGrid, HydroParams,
                    double>(),
           py::arg("surface"), py::arg("indenter"), py::arg("elastomer"),
           py::arg("grid"), py::arg("params"),
           py::arg("max_substep_disp") = 0.005)
      .def("make_state", &HydroelasticModel::make_state, py::arg("initial"))
      .def("step", &HydroelasticModel::step, py::arg("state"),
           py::arg("pose_now"), py::call_guard<py::gil_scoped_release>())
      .def("dilation", &HydroelasticModel::dilation, py::arg("pose"))
      .def("shear", &HydroelasticModel::shear, py::arg("state"))
      .def("total", &HydroelasticModel::total, py::arg("state"))
      .def("gravity_augmented", &HydroelasticModel::gravity_augmented,
           py::arg("state"), py::arg("gravity_xf"))
      .def("decompose_force", &HydroelasticModel::decompose_force)
      .def("decompose_offset", &HydroelasticModel::decompose_offset)
      .def("params", &HydroelasticModel::params)
      .def("grid", &HydroelasticModel::grid);

  m.def("contact_fraction", &contact_fraction, py::arg("phi_now"),
        py::arg("phi_prev"));
  m.def("recover_forces", &recover_forces, py::arg("state"), py::arg("K"),
        py::arg("area"));

  // ---- baselines --------------------------------------------------------------
  py::class_<FotsParams> fots_params(m, "FotsParams");
  py::enum_<FotsParams::CenterMode>(fots_params, "CenterMode")
      .value("ObjectFrame", FotsParams::CenterMode::ObjectFrame)
      .value("InitialContactPatch",
             FotsParams::CenterMode::InitialContactPatch);
  fots_params.def(py::init<>())
      .def_readwrite("lambda_d", &FotsParams::lambda_d)
      .def_readwrite("lambda_s", &FotsParams::lambda_s)
      .def_readwrite("lambda_t", &FotsParams::lambda_t)
      .def_readwrite("shear_max", &FotsParams::shear_max)
      .def_readwrite("twist_max", &FotsParams::twist_max)
      .def_readwrite("center_mode", &FotsParams::center_mode);

  py::class_<FotsSession>(m, "FotsSession")
      .def(py::init<FotsParams, TactileGrid, SdfPtr>(), py::arg("params"),
           py::arg("grid"), py::arg("indenter"))
      .def("step", &FotsSession::step, py::arg("pose_now"))
      .def("reset", &FotsSession::reset)
      .def("anchored", &FotsSession::anchored);

  py::class_<PenaltyParams>(m, "PenaltyParams")
      .def(py::init<>())
      .def_readwrite("k_n", &PenaltyParams::k_n)
      .def_readwrite("k_t", &PenaltyParams::k_t)
      .def_readwrite("mu", &PenaltyParams::mu);

  m.def("penalty_field", &penalty_field, py::arg("grid"), py::arg("indenter"),
        py::arg("pose"), py::arg("angular"), py::arg("linear"),
        py::arg("params"));

  // ---- metrics ------------------------------------------------------------------
  py::class_<CosineResult>(m, "CosineResult")
      .def_readonly("value", &CosineResult::value)
      .def_readonly("taxels", &CosineResult::taxels)
      .def("defined", &CosineResult::defined);

  m.def("rmse_px", &rmse_px, py::arg("pred"), py::arg("truth"),
        py::arg("scale"));
  m.def("cosine_similarity", &cosine_similarity, py::arg("pred"),
        py::arg("truth"), py::arg("scale"),
        py::arg("magnitude_floor_px") = 0.3);

  // ---- calibration -----------------------------------------------------------------
  py::enum_<SampleKind>(m, "SampleKind")
      .value("Dilation", SampleKind::Dilation)
      .value("Shear", SampleKind::Shear)
      .value("Twist", SampleKind::Twist)
      .value("Roll", SampleKind::Roll)
      .value("Slip", SampleKind::Slip);

  py::class_<CalibrationSample>(m, "CalibrationSample")
      .def(py::init<>())
      .def_readwrite("kind", &CalibrationSample::kind)
      .def_readwrite("trajectory", &CalibrationSample::trajectory)
      .def_readwrite("observed", &CalibrationSample::observed);

  py::class_<CalibrationSetup>(m, "CalibrationSetup")
      .def(py::init<>())
      .def_readwrite("surface", &CalibrationSetup::surface)
      .def_readwrite("indenter", &CalibrationSetup::indenter)
      .def_readwrite("elastomer", &CalibrationSetup::elastomer)
      .def_readwrite("grid", &CalibrationSetup::grid)
      .def_readwrite("scale", &CalibrationSetup::scale)
      .def_readwrite("base", &CalibrationSetup::base)
      .def_readwrite("max_substep_disp", &CalibrationSetup::max_substep_disp);

  py::class_<SearchBracket>(m, "SearchBracket")
      .def(py::init<>())
      .def_readwrite("lo", &SearchBracket::lo)
      .def_readwrite("hi", &SearchBracket::hi);

  py::class_<CalibrationOptions>(m, "CalibrationOptions")
      .def(py::init<>())
      .def_readwrite("lambda_bracket", &CalibrationOptions::lambda_bracket)
      .def_readwrite("k_bracket", &CalibrationOptions::k_bracket)
      .def_readwrite("mu_bracket", &CalibrationOptions::mu_bracket)
      .def_readwrite("coarse_points", &CalibrationOptions::coarse_points)
      .def_readwrite("log10_tol", &CalibrationOptions::log10_tol)
      .def_readwrite("contact_mask_spacings",
                     &CalibrationOptions::contact_mask_spacings);

  py::class_<StageResult>(m, "StageResult")
      .def_readonly("value", &StageResult::value)
      .def_readonly("residual", &StageResult::residual)
      .def_readonly("evaluations", &StageResult::evaluations)
      .def_readonly("flat_objective", &StageResult::flat_objective)
      .def_readonly("at_bracket_edge", &StageResult::at_bracket_edge);

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("params", &CalibrationResult::params)
      .def_readonly("lambda_d", &CalibrationResult::lambda_d)
      .def_readonly("lambda_s", &CalibrationResult::lambda_s)
      .def_readonly("k", &CalibrationResult::k)
      .def_readonly("mu", &CalibrationResult::mu)
      .def_readonly("warnings", &CalibrationResult::warnings)
      .def("degenerate", &CalibrationResult::degenerate);

  py::enum_<CalibrationStage>(m, "CalibrationStage")
      .value("LambdaD", CalibrationStage::LambdaD)
      .value("LambdaS", CalibrationStage::LambdaS)
      .value("Stiffness", CalibrationStage::Stiffness)
      .value("Friction", CalibrationStage::Friction);

  m.def("calibration_objective", &calibration_objective, py::arg("stage"),
        py::arg("x"), py::arg("setup"), py::arg("samples"), py::arg("priors"),
        py::arg("opts") = CalibrationOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("calibrate", &calibrate, py::arg("setup"), py::arg("samples"),
        py::arg("opts") = CalibrationOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("refine_shear_jointly", &refine_shear_jointly, py::arg("setup"),
        py::arg("samples"), py::arg("result"), py::arg("grid_points") = 9,
        py::arg("half_span_decades") = 0.15,
        py::arg("opts") = CalibrationOptions{},
        py::call_guard<py::gil_scoped_release>());

  // ---- synthetic datasets -------------------------------------------------------------
  py::enum_<MotionKind>(m, "MotionKind")
      .value("NoMotion", MotionKind::None)
      .value("Slide", MotionKind::Slide)
      .value("Twist", MotionKind::Twist)
      .value("Roll", MotionKind::Roll);

  m.def("make_motion_trajectory", &make_motion_trajectory, py::arg("xy"),
        py::arg("bottom_offset"), py::arg("depth"), py::arg("motion"),
        py::arg("direction"), py::arg("magnitude"), py::arg("press_steps"),
        py::arg("motion_steps"), py::arg("dt") = 0.05,
        py::arg("start_clearance") = 5e-4);

  py::class_<SynthOptions>(m, "SynthOptions")
      .def(py::init<>())
      .def_readwrite("dilation_samples", &SynthOptions::dilation_samples)
      .def_readwrite("shear_samples", &SynthOptions::shear_samples)
      .def_readwrite("twist_samples", &SynthOptions::twist_samples)
      .def_readwrite("roll_samples", &SynthOptions::roll_samples)
      .def_readwrite("slip_samples", &SynthOptions::slip_samples)
      .def_readwrite("press_steps", &SynthOptions::press_steps)
      .def_readwrite("motion_steps", &SynthOptions::motion_steps)
      .def_readwrite("dt", &SynthOptions::dt)
      .def_readwrite("noise_px", &SynthOptions::noise_px)
      .def_readwrite("seed", &SynthOptions::seed);

  m.def("make_synth_setup", &make_synth_setup,
        py::arg("surface_samples") = 256, py::arg("surface_seed") = 7);
  m.def("make_synth_dataset", &make_synth_dataset, py::arg("setup"),
        py::arg("truth"), py::arg("opts") = SynthOptions{},
        py::call_guard<py::gil_scoped_release>());

  // ---- batching -----------------------------------------------------------------------
  py::enum_<ModelKind>(m, "ModelKind")
      .value("Hydroelastic", ModelKind::Hydroelastic)
      .value("FotsOriginal", ModelKind::FotsOriginal)
      .value("FotsReimpl", ModelKind::FotsReimpl)
      .value("Penalty", ModelKind::Penalty);

  py::class_<AllParams>(m, "AllParams")
      .def(py::init<>())
      .def_readwrite("hydro", &AllParams::hydro)
      .def_readwrite("fots", &AllParams::fots)
      .def_readwrite("penalty", &AllParams::penalty)
      .def_readwrite("scale", &AllParams::scale);

  py::class_<BatchConfig>(m, "BatchConfig")
      .def(py::init<>())
      .def_readwrite("model", &BatchConfig::model)
      .def_readwrite("indenter", &BatchConfig::indenter)
      .def_readwrite("elastomer", &BatchConfig::elastomer)
      .def_readwrite("surface", &BatchConfig::surface)
      .def_readwrite("grid", &BatchConfig::grid)
      .def_readwrite("params", &BatchConfig::params)
      .def_readwrite("max_substep_disp", &BatchConfig::max_substep_disp)
      .def_readwrite("threads", &BatchConfig::threads);

  py::class_<BatchSim>(m, "BatchSim")
      .def(py::init<BatchConfig, int>(), py::arg("config"),
           py::arg("env_count"))
      .def("env_count", &BatchSim::env_count)
      .def("batch_step",
           static_cast<std::vector<MarkerField> (BatchSim::*)(
               const std::vector<Pose>&)>(&BatchSim::batch_step),
           py::arg("poses"), py::call_guard<py::gil_scoped_release>())
      .def("reset", &BatchSim::reset, py::arg("env"))
      .def("reset_all", &BatchSim::reset_all)
      .def("hydro_state", &BatchSim::hydro_state, py::arg("env"),
           py::return_value_policy::reference_internal);

  py::class_<BenchPoint>(m, "BenchPoint")
      .def_readonly("env_count", &BenchPoint::env_count)
      .def_readonly("mean_ms", &BenchPoint::mean_ms)
      .def_readonly("stdev_ms", &BenchPoint::stdev_ms);

  py::class_<BenchReport>(m, "BenchReport")
      .def_readonly("model", &BenchReport::model)
      .def_readonly("points", &BenchReport::points)
      .def_readonly("beta", &BenchReport::beta)
      .def_readonly("warmup_steps", &BenchReport::warmup_steps)
      .def_readonly("timed_steps", &BenchReport::timed_steps)
      .def_readonly("threads", &BenchReport::threads);

  m.def("run_benchmark", &run_benchmark, py::arg("config"),
        py::arg("env_counts"), py::arg("timed_steps") = 20,
        py::arg("warmup_steps") = 5,
        py::call_guard<py::gil_scoped_release>());
  m.def("format_report", &format_report, py::arg("report"));
  m.def("bench_rollout_pose", &bench_rollout_pose, py::arg("env"),
        py::arg("step"), py::arg("total_steps"));

  // ---- file IO --------------------------------------------------------------------------
  m.def("format_double", &format_double);
  m.def("load_trajectory", &load_trajectory, py::arg("path"));
  m.def("save_trajectory", &save_trajectory, py::arg("path"),
        py::arg("trajectory"));

  py::class_<FieldFile>(m, "FieldFile")
      .def_readonly("field", &FieldFile::field)
      .def_readonly("grid", &FieldFile::grid)
      .def_readonly("scale", &FieldFile::scale)
      .def_readonly("kind", &FieldFile::kind);

  m.def("save_field", &save_field, py::arg("path"), py::arg("field"),
        py::arg("grid"), py::arg("scale"), py::arg("kind") = "",
        py::arg("binary_payload") = false);
  m.def("load_field", &load_field, py::arg("path"));
  m.def("save_surface", &save_surface, py::arg("path"), py::arg("samples"));
  m.def("load_surface", &load_surface, py::arg("path"));
  m.def("save_params", &save_params, py::arg("path"), py::arg("params"));
  m.def("load_params", &load_params, py::arg("path"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("model", &Scenario::model)
      .def_readwrite("indenter", &Scenario::indenter)
      .def_readwrite("indenter_desc", &Scenario::indenter_desc)
      .def_readwrite("surface_samples", &Scenario::surface_samples)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("grid", &Scenario::grid)
      .def_readwrite("params", &Scenario::params)
      .def_readwrite("max_substep_disp", &Scenario::max_substep_disp)
      .def_readwrite("gravity", &Scenario::gravity);

  m.def("load_scenario", &load_scenario, py::arg("path"));

  py::class_<DatasetFile>(m, "DatasetFile")
      .def_readonly("samples", &DatasetFile::samples)
      .def_readonly("grid", &DatasetFile::grid)
      .def_readonly("scale", &DatasetFile::scale);

  m.def("load_dataset", &load_dataset, py::arg("manifest_path"));
  m.def("save_dataset", &save_dataset, py::arg("dir"), py::arg("samples"),
        py::arg("grid"), py::arg("scale"));

  // ---- command line ------------------------------------------------------------------------
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv;
        argv.push_back("tacshear");
        for (const std::string& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "same exit codes as the tacshear binary");
}
