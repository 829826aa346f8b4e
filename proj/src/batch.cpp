#include "tacshear/batch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tacshear/io.hpp"

namespace tacshear {

// ---------------------------------------------------------------------------
// WorkPool

WorkPool::WorkPool(int threads) {
  int n = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  workers_.reserve(static_cast<size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i)
    workers_.emplace_back([this] { worker_loop(); });
}

WorkPool::~WorkPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (std::thread& t : workers_) t.join();
}

void WorkPool::worker_loop() {
  uint64_t seen = 0;
  for (;;) {
    const std::function<void(int)>* job = nullptr;
    int n = 0;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      n = job_n_;
    }
    for (int i = next_.fetch_add(1); i < n; i = next_.fetch_add(1)) (*job)(i);
    if (pending_.fetch_sub(1) == 1) {
      std::lock_guard<std::mutex> lock(mutex_);
      done_cv_.notify_all();
    }
  }
}

void WorkPool::run(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers_.empty()) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    job_ = &fn;
    job_n_ = n;
    next_.store(0);
    pending_.store(static_cast<int>(workers_.size()));
    ++generation_;
  }
  start_cv_.notify_all();
  for (int i = next_.fetch_add(1); i < n; i = next_.fetch_add(1)) fn(i);
  std::unique_lock<std::mutex> lock(mutex_);
  done_cv_.wait(lock, [&] { return pending_.load() == 0; });
  job_ = nullptr;
}

// ---------------------------------------------------------------------------
// BatchSim

BatchSim::BatchSim(BatchConfig config, int env_count)
    : cfg_(std::move(config)), env_count_(env_count), pool_(cfg_.threads) {
  if (env_count_ < 1) throw DataError("batch needs at least one environment");
  if (!cfg_.indenter) throw DataError("batch config has no indenter");

  switch (cfg_.model) {
    case ModelKind::Hydroelastic: {
      if (!cfg_.elastomer)
        cfg_.elastomer =
            std::make_shared<HalfspaceSdf>(HalfspaceSdf::xy_plane(
                cfg_.grid.plane_height));
      if (cfg_.surface.count() == 0)
        throw DataError("hydroelastic batch needs surface samples");
      hydro_ = std::make_shared<HydroelasticModel>(
          cfg_.surface, cfg_.indenter, cfg_.elastomer, cfg_.grid,
          cfg_.params.hydro, cfg_.max_substep_disp);
      hydro_states_.resize(static_cast<size_t>(env_count_));
      break;
    }
    case ModelKind::FotsOriginal:
    case ModelKind::FotsReimpl: {
      FotsParams fp = cfg_.params.fots;
      fp.center_mode = cfg_.model == ModelKind::FotsOriginal
                           ? FotsParams::CenterMode::ObjectFrame
                           : FotsParams::CenterMode::InitialContactPatch;
      fots_.reserve(static_cast<size_t>(env_count_));
      for (int i = 0; i < env_count_; ++i)
        fots_.emplace_back(fp, cfg_.grid, cfg_.indenter);
      break;
    }
    case ModelKind::Penalty:
      prev_poses_.resize(static_cast<size_t>(env_count_));
      break;
  }
  started_.assign(static_cast<size_t>(env_count_), 0);
}

const TrackerState& BatchSim::hydro_state(int env) const {
  if (cfg_.model != ModelKind::Hydroelastic)
    throw DataError("hydro_state is only available for hydroelastic batches");
  return hydro_states_[static_cast<size_t>(env)];
}

void BatchSim::step_env(int env, const Pose& pose, MarkerField& out) {
  const size_t e = static_cast<size_t>(env);
  switch (cfg_.model) {
    case ModelKind::Hydroelastic: {
      TrackerState& state = hydro_states_[e];
      if (!started_[e]) {
        state = hydro_->make_state(pose);
        started_[e] = 1;
      } else {
        hydro_->step(state, pose);
      }
      out = hydro_->total(state);
      break;
    }
    case ModelKind::FotsOriginal:
    case ModelKind::FotsReimpl:
      started_[e] = 1;
      out = fots_[e].step(pose);
      break;
    case ModelKind::Penalty: {
      Vec3 angular = Vec3::Zero(), linear = Vec3::Zero();
      if (started_[e]) {
        const Pose& prev = prev_poses_[e];
        const Eigen::AngleAxisd aa(pose.q * prev.q.conjugate());
        angular = aa.angle() * aa.axis();
        linear = pose.t - prev.t;
      }
      out = penalty_field(cfg_.grid, *cfg_.indenter, pose, angular, linear,
                          cfg_.params.penalty);
      prev_poses_[e] = pose;
      started_[e] = 1;
      break;
    }
  }
}

void BatchSim::batch_step(const std::vector<Pose>& poses,
                          std::vector<MarkerField>& fields_out) {
  if (static_cast<int>(poses.size()) != env_count_)
    throw DataError("batch_step needs exactly one pose per environment");
  fields_out.resize(static_cast<size_t>(env_count_));
  pool_.run(env_count_, [&](int i) {
    step_env(i, poses[static_cast<size_t>(i)],
             fields_out[static_cast<size_t>(i)]);
  });
}

std::vector<MarkerField> BatchSim::batch_step(const std::vector<Pose>& poses) {
  std::vector<MarkerField> fields;
  batch_step(poses, fields);
  return fields;
}

void BatchSim::reset(int env) {
  if (env < 0 || env >= env_count_) throw DataError("reset: bad env index");
  const size_t e = static_cast<size_t>(env);
  started_[e] = 0;
  switch (cfg_.model) {
    case ModelKind::Hydroelastic: hydro_states_[e] = TrackerState{}; break;
    case ModelKind::FotsOriginal:
    case ModelKind::FotsReimpl: fots_[e].reset(); break;
    case ModelKind::Penalty: prev_poses_[e] = Pose{}; break;
  }
}

void BatchSim::reset_all() {
  for (int i = 0; i < env_count_; ++i) reset(i);
}

// ---------------------------------------------------------------------------
// Benchmark

Pose bench_rollout_pose(int env, int step, int total_steps) {
  // Press for the first third, slide-and-twist for the rest; slide direction
  // and twist sign vary with the environment index so lanes are not
  // trivially identical.
  const double angle = 2.0 * M_PI * (env % 64) / 64.0;
  const Vec2 dir(std::cos(angle), std::sin(angle));
  const int press_steps = std::max(total_steps / 3, 1);
  const double depth = 1.2e-3;
  const double start_z = 5e-4;

  Pose pose;
  if (step <= press_steps) {
    const double s = static_cast<double>(step) / press_steps;
    pose.t = Vec3(0, 0, start_z - s * (start_z + depth));
  } else {
    const double s = static_cast<double>(step - press_steps) /
                     std::max(total_steps - press_steps, 1);
    const double slide = 1.5e-3 * s;
    const double twist = (env % 2 == 0 ? 1.0 : -1.0) * 0.15 * s;
    pose.t = Vec3(slide * dir.x(), slide * dir.y(), -depth);
    pose.q = Quat(Eigen::AngleAxisd(twist, Vec3::UnitZ()));
  }
  return pose;
}

BenchReport run_benchmark(const BatchConfig& config,
                          const std::vector<int>& env_counts, int timed_steps,
                          int warmup_steps) {
  if (timed_steps < 2) throw DataError("benchmark needs at least 2 steps");
  BenchReport report;
  report.model = config.model;
  report.warmup_steps = warmup_steps;
  report.timed_steps = timed_steps;
  report.threads = WorkPool(config.threads).threads();

  for (int envs : env_counts) {
    BatchSim sim(config, envs);
    const int total = warmup_steps + timed_steps;
    std::vector<Pose> poses(static_cast<size_t>(envs));
    std::vector<MarkerField> fields;
    std::vector<double> ms;
    ms.reserve(static_cast<size_t>(timed_steps));
    for (int step = 0; step < total; ++step) {
      for (int e = 0; e < envs; ++e)
        poses[static_cast<size_t>(e)] = bench_rollout_pose(e, step, total);
      const auto t0 = std::chrono::steady_clock::now();
      sim.batch_step(poses, fields);
      const auto t1 = std::chrono::steady_clock::now();
      if (step >= warmup_steps)
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    double mean = 0.0;
    for (double v : ms) mean += v;
    mean /= static_cast<double>(ms.size());
    double var = 0.0;
    for (double v : ms) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ms.size() - 1);
    report.points.push_back({envs, mean, std::sqrt(var)});
  }

  // Least-squares slope of log(mean) over log(env_count).
  if (report.points.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(report.points.size());
    for (const BenchPoint& p : report.points) {
      const double x = std::log(static_cast<double>(p.env_count));
      const double y = std::log(std::max(p.mean_ms, 1e-9));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    report.beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return report;
}

std::string format_report(const BenchReport& report) {
  std::ostringstream out;
  out << "model " << to_string(report.model) << " (" << report.threads
      << " threads, " << report.timed_steps << " timed steps, "
      << report.warmup_steps << " warmup)\n";
  char line[128];
  std::snprintf(line, sizeof(line), "  %8s  %12s  %12s\n", "envs",
                "mean [ms]", "stdev [ms]");
  out << line;
  for (const BenchPoint& p : report.points) {
    std::snprintf(line, sizeof(line), "  %8d  %12.3f  %12.3f\n", p.env_count,
                  p.mean_ms, p.stdev_ms);
    out << line;
  }
  std::snprintf(line, sizeof(line), "  scaling exponent beta = %.3f\n",
                report.beta);
  out << line;
  return out.str();
}

void save_report_csv(const std::string& path,
                     const std::vector<BenchReport>& reports) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "model,threads,env_count,mean_ms,stdev_ms,beta\n";
    for (const BenchReport& r : reports)
      for (const BenchPoint& p : r.points)
        out << to_string(r.model) << ',' << r.threads << ',' << p.env_count
            << ',' << format_double(p.mean_ms) << ','
            << format_double(p.stdev_ms) << ',' << format_double(r.beta)
            << "\n";
  });
}

}  // namespace tacshear
