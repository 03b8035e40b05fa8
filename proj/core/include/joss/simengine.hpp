#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "joss/dag.hpp"
#include "joss/models.hpp"
#include "joss/platform.hpp"

namespace joss {

class SimEngine;

/// Scheduler-side contract. All callbacks run on the single event loop.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;

  virtual void start(SimEngine&) {}
  /// A task's dependencies are satisfied; the scheduler must eventually
  /// place it (immediately or from a later callback).
  virtual void task_ready(SimEngine&, TaskId) = 0;
  /// First partition of the task began executing.
  virtual void task_started(SimEngine&, TaskId) {}
  /// Task fully completed. exec_seconds is the span of the last-finishing
  /// partition, i.e. the oracle time when frequencies were stable.
  virtual void task_finished(SimEngine&, TaskId, double exec_seconds) {}
  /// A frequency transition completed on a domain (cluster index, or -1 for
  /// memory).
  virtual void freq_changed(SimEngine&, int domain) {}
  /// A steal happened (used by the aequitas-like thief tracking).
  virtual void stolen(SimEngine&, int thief_core, int victim_core) {}
  virtual void timer_fired(SimEngine&, int timer_id) {}

  /// Whether whole tasks may be stolen across clusters.
  virtual bool cross_cluster_steal() const { return false; }
  /// Extra report fields (chosen configurations, search stats, ...).
  virtual void finalize_report(SimEngine&, struct RunReport&) {}
};

struct RunReport {
  std::string scheduler;
  std::uint64_t seed = 0;
  double makespan_s = 0.0;
  double cpu_j = 0.0;
  double mem_j = 0.0;
  double attributed_j = 0.0;
  double unattributed_idle_j = 0.0;
  double idle_j = 0.0;
  // Present only when the 5 ms sampled-meter mode is enabled.
  std::optional<double> sampled_cpu_j;
  std::optional<double> sampled_mem_j;
  double sampling_overhead_fraction = 0.0;
  long search_cells_evaluated = 0;
  long search_steps = 0;
  std::map<std::string, Configuration> kernel_configs;
  std::map<std::string, int> kernel_selection_hints;
  int tasks_executed = 0;

  double total_j() const { return cpu_j + mem_j; }
};

enum class EventKind : int {
  PartitionDone = 0,
  FreqTransitionDone = 1,
  SampleBoundary = 2,
  Steal = 3,
};

/// A queue entry: either a whole task awaiting expansion or one partition of
/// a moldable task.
struct WorkItem {
  TaskId task;
  int partition = -1;  // -1: whole task
};

/// Single-threaded discrete-event simulator of the platform. Drives a
/// Scheduler, times partitions with the ground-truth oracle and meters
/// energy exactly over piecewise-constant power intervals.
class SimEngine {
 public:
  SimEngine(const GroundTruth& gt, const TaskDAG& dag, std::uint64_t seed);
  // The engine keeps pointers to both; temporaries would dangle.
  SimEngine(const GroundTruth&, TaskDAG&&, std::uint64_t) = delete;
  SimEngine(GroundTruth&&, const TaskDAG&, std::uint64_t) = delete;

  RunReport run(Scheduler& sched);

  // --- services available to schedulers -------------------------------
  double now() const { return now_; }
  const PlatformSpec& spec() const { return gt_->spec(); }
  const GroundTruth& truth() const { return *gt_; }
  const TaskDAG& dag() const { return *dag_; }
  std::mt19937_64& rng() { return rng_; }

  /// Place a whole task on the queue of a specific core. cfg fixes the
  /// (cluster, n_cores) the task will expand with (the cluster may differ if
  /// the task is later stolen cross-cluster under a permissive policy).
  void place_task(TaskId t, const Configuration& cfg, int core);
  int random_core_of_cluster(int cluster);
  int random_core();

  double cluster_freq(int cluster) const { return cluster_dom_[cluster].current; }
  double mem_freq() const { return mem_dom_.current; }
  /// Requests a transition (coalescing an in-flight one); no-op when the
  /// target equals the current value and nothing is pending.
  void request_cluster_freq(int cluster, double ghz);
  void request_mem_freq(double ghz);
  bool cluster_freq_pending(int cluster) const { return cluster_dom_[cluster].pending; }
  bool mem_freq_pending() const { return mem_dom_.pending; }

  /// Instantaneous running-task count (tasks with at least one executing
  /// partition).
  int running_tasks() const;
  int running_tasks_on_cluster(int cluster) const;
  /// Cores currently executing partitions of task t.
  int cores_in_use(TaskId t) const;

  int cluster_of_core(int core) const { return core_cluster_[core]; }
  size_t queue_length(int core) const { return queues_[core].size(); }
  /// Queued same-kernel whole-task count across a cluster's queues.
  int queued_kernel_tasks(int cluster, const std::string& kernel) const;
  bool core_busy(int core) const { return busy_[core]; }

  /// Recurring timer; fires timer_fired(timer_id) every period seconds.
  void add_timer(int timer_id, double period_s);

  /// Enable the sampled meter (period from the platform spec) in addition to
  /// exact integration.
  void enable_sampled_meter() { sampled_meter_ = true; }
  /// Optional event trace: "t kind core cluster f_c f_m task" per line.
  void set_trace(std::vector<std::string>* sink) { trace_ = sink; }

  double task_attributed_j(TaskId t) const { return task_energy_j_.at(t); }
  /// Per-task execution records for test inspection.
  struct TaskTimes {
    double first_start = -1.0;
    double completion = -1.0;
  };
  const std::vector<TaskTimes>& task_times() const { return task_times_; }

 private:
  struct Event {
    double time;
    EventKind kind;
    int id;        // partition id / domain id / core id / timer id
    long gen;      // staleness check
    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (kind != o.kind) return static_cast<int>(kind) > static_cast<int>(o.kind);
      return id > o.id;
    }
  };

  struct Partition {
    int id = -1;
    TaskId task = 0;
    int index = 0;        // within the task
    int core = -1;        // executing core, -1 while queued
    double comp_rem = 0;  // seconds at the frequencies below
    double stall_rem = 0;
    double f_c_at = 0.0;  // frequencies comp_rem/stall_rem are scaled for
    double f_m_at = 0.0;
    double start_time = -1.0;
    double last_update = 0.0;
    long gen = 0;
    bool done = false;
  };

  struct TaskRun {
    Configuration cfg;   // as placed; cluster rebound on expansion
    int exec_cluster = -1;
    int parts_total = 0;
    int parts_done = 0;
    int parts_running = 0;
    bool expanded = false;
    bool started = false;
  };

  struct FreqDomain {
    double current = 0.0;
    std::vector<double> ladder;
    double latency = 0.0;
    bool pending = false;
    double pending_target = 0.0;
    long gen = 0;
  };

  void push_event(double t, EventKind k, int id, long gen);
  void advance_meter(double to);
  void core_fetch_work(int core, bool via_steal_event);
  void start_partition(int part_id, int core, Scheduler& sched);
  void expand_task(TaskId t, int core, Scheduler& sched);
  void on_partition_done(int part_id, Scheduler& sched);
  void on_freq_done(int domain, Scheduler& sched);
  void wake_idle_cores(int cluster /* -1: all */);
  void rescale_partitions_on(int cluster /* -1: memory change, all */);
  void reschedule_partition(Partition& p);
  double partition_power_cpu(const Partition& p) const;
  double partition_power_mem(const Partition& p) const;
  Configuration live_config(const TaskRun& tr) const;
  void trace_line(const std::string& kind, int core, TaskId task);

  const GroundTruth* gt_;
  const TaskDAG* dag_;
  std::mt19937_64 rng_;
  Scheduler* sched_ = nullptr;

  double now_ = 0.0;
  double meter_t_ = 0.0;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;

  std::vector<int> core_cluster_;          // core id -> cluster
  std::vector<std::vector<int>> cluster_cores_;
  std::vector<std::deque<WorkItem>> queues_;
  std::vector<bool> busy_;
  std::vector<bool> wake_pending_;
  std::vector<int> core_part_;  // running partition id per core, -1 if none

  std::vector<FreqDomain> cluster_dom_;
  FreqDomain mem_dom_;

  std::vector<Partition> partitions_;
  std::vector<TaskRun> task_runs_;
  std::vector<int> unresolved_preds_;
  std::vector<std::vector<TaskId>> successors_;
  int executed_ = 0;
  double last_completion_ = 0.0;

  // metering
  double cpu_j_ = 0.0, mem_j_ = 0.0, idle_j_ = 0.0, unattributed_j_ = 0.0;
  std::vector<double> task_energy_j_;
  std::vector<TaskTimes> task_times_;
  bool sampled_meter_ = false;
  double sampled_cpu_j_ = 0.0, sampled_mem_j_ = 0.0;
  double next_sample_t_ = 0.0;

  std::vector<std::string>* trace_ = nullptr;
  long timer_base_gen_ = 0;
  std::map<int, double> timer_period_;
};

}  // namespace joss
