#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "tacshear/fots.hpp"
#include "tacshear/hydroelastic.hpp"
#include "tacshear/io.hpp"
#include "tacshear/penalty.hpp"

namespace tacshear {

// Persistent worker pool dispatching index ranges through a shared atomic
// counter (work stealing at item granularity). Item order is unspecified;
// callers keep determinism by writing to disjoint slots.
class WorkPool {
public:
  explicit WorkPool(int threads = 0);  // 0 = hardware concurrency
  ~WorkPool();

  WorkPool(const WorkPool&) = delete;
  WorkPool& operator=(const WorkPool&) = delete;

  int threads() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(0..n-1), blocking until all items finish. The calling thread
  // participates.
  void run(int n, const std::function<void(int)>& fn);

private:
  void worker_loop();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  int job_n_ = 0;
  uint64_t generation_ = 0;
  std::atomic<int> next_{0};
  std::atomic<int> pending_{0};
  bool stop_ = false;
};

// Scene shared by every environment of a batch.
struct BatchConfig {
  ModelKind model = ModelKind::Hydroelastic;
  SdfPtr indenter;
  SdfPtr elastomer;         // hydroelastic only
  SurfaceSamples surface;   // hydroelastic only
  TactileGrid grid;
  AllParams params;
  double max_substep_disp = 0.005;
  int threads = 0;  // worker threads for batch_step; 0 = hardware concurrency
};

// Many independent environments stepped in lockstep. Environments never
// share mutable state, so each lane's output is bit-identical to running it
// alone, whatever the batch size or worker count.
//
// The first pose an environment receives (re)initializes its state; later
// poses advance it. All four model kinds present the same interface; the
// FOTS variants differ only in their dissipation-center mode.
class BatchSim {
public:
  BatchSim(BatchConfig config, int env_count);

  int env_count() const { return env_count_; }
  const BatchConfig& config() const { return cfg_; }

  void batch_step(const std::vector<Pose>& poses,
                  std::vector<MarkerField>& fields_out);
  std::vector<MarkerField> batch_step(const std::vector<Pose>& poses);

  // Returns env to its pre-first-pose state; other envs are untouched.
  void reset(int env);
  void reset_all();

  const TrackerState& hydro_state(int env) const;

private:
  void step_env(int env, const Pose& pose, MarkerField& out);

  BatchConfig cfg_;
  int env_count_ = 0;
  WorkPool pool_;

  std::shared_ptr<const HydroelasticModel> hydro_;
  std::vector<TrackerState> hydro_states_;
  std::vector<FotsSession> fots_;
  std::vector<Pose> prev_poses_;
  std::vector<uint8_t> started_;
};

// ---------------------------------------------------------------------------
// Throughput benchmark over the batch engine, on synthetic press-slide-twist
// pose rollouts of matched length per environment.

struct BenchPoint {
  int env_count = 0;
  double mean_ms = 0.0;   // per batch_step, timed steps only
  double stdev_ms = 0.0;
};

struct BenchReport {
  ModelKind model = ModelKind::Hydroelastic;
  std::vector<BenchPoint> points;
  double beta = 0.0;  // slope of log(mean) vs log(env_count)
  int warmup_steps = 0;
  int timed_steps = 0;
  int threads = 0;
};

BenchReport run_benchmark(const BatchConfig& config,
                          const std::vector<int>& env_counts,
                          int timed_steps = 20, int warmup_steps = 5);

std::string format_report(const BenchReport& report);
void save_report_csv(const std::string& path,
                     const std::vector<BenchReport>& reports);

// Pose of benchmark rollout `env` at step `step`: a press, then a slide and
// twist whose direction varies per environment.
Pose bench_rollout_pose(int env, int step, int total_steps);

}  // namespace tacshear
