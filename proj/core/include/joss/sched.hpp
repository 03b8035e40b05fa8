#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "joss/models.hpp"
#include "joss/search.hpp"
#include "joss/simengine.hpp"

namespace joss {

enum class GoalKind { MinEnergy, Constrained, MaxPerf };

struct SchedGoal {
  GoalKind kind = GoalKind::MinEnergy;
  double speedup_target = 1.0;
};

/// Parses "min_energy" | "speedup:<x>" | "max_perf".
SchedGoal parse_goal(const std::string& text);

/// Averaging heuristic for a shared frequency domain: a solo requester gets
/// its exact value; with concurrency the mean of requested and current is
/// snapped to the nearest ladder value (ties toward the lower frequency).
double coordinate_frequency(double requested_ghz, double current_ghz,
                            int other_running, const std::vector<double>& ladder);

struct SchedOptions {
  SchedGoal goal;
  /// Build the lookup tables straight from the oracle instead of the fitted
  /// models (verification runs isolating scheduling from model error).
  bool oracle_tables = false;
  /// 1-core sampled time below which a task counts as fine-grained;
  /// negative selects the default of 10x the cluster DVFS latency.
  double fine_grain_threshold_s = -1.0;
  /// Fine-grained tasks are grouped so one DVFS decision covers the group.
  int min_group = 8;
};

/// Per-kernel lookup tables filled directly from the ground truth.
KernelTables oracle_tables(const GroundTruth& gt, const std::string& kernel);

/// Shared machinery for every table-driven scheduler: per-kernel sampling at
/// the two probe frequencies (clusters advance asynchronously, with tasks
/// buffered across a probe-frequency switch so samples stay clean), table
/// prediction, memoized configuration selection, random same-cluster
/// placement, frequency coordination and fine-grained task grouping.
/// Subclasses define the selection objective and which DVFS knobs they use.
class TableScheduler : public Scheduler {
 public:
  TableScheduler(const GroundTruth& gt, ModelSet models, SchedOptions opt);

  void start(SimEngine& eng) override;
  void task_ready(SimEngine& eng, TaskId t) override;
  void task_started(SimEngine& eng, TaskId t) override;
  void task_finished(SimEngine& eng, TaskId t, double exec_seconds) override;
  void freq_changed(SimEngine& eng, int domain) override;
  void finalize_report(SimEngine& eng, RunReport& report) override;

  // test/CLI introspection
  const std::map<std::string, KernelTables>& tables() const { return tables_; }
  const std::map<std::string, Configuration>& selections() const { return chosen_; }
  const std::map<std::string, int>& selection_hints() const { return hints_; }
  int groups_formed(const std::string& kernel) const;
  int sampled_executions() const { return sampled_executions_; }

 protected:
  virtual Configuration select_config(SearchContext& ctx, SearchStats& stats) = 0;
  virtual bool uses_cluster_dvfs() const = 0;
  virtual bool uses_mem_dvfs() const = 0;

  const GroundTruth& gt() const { return *gt_; }
  const PlatformSpec& spec() const { return gt_->spec(); }

 private:
  struct SampleSlot {
    int option;  // core_option_list index
    int stage;   // 0 = f_C probe, 1 = f_C' probe
    TaskId task = -1;
    double time_s = -1.0;
  };

  struct KernelState {
    bool steady = false;
    std::vector<SampleSlot> slots;
    size_t next_slot = 0;
    int slots_done = 0;
    std::vector<TaskId> deferred;
    Configuration chosen;
    bool fine = false;
    int covered_remaining = 0;  // group members without their own decision
    int groups = 0;
  };

  struct ClusterSampling {
    double freq = 0.0;  // committed probe frequency
    bool transitioning = false;
    int active = 0;  // sample tasks placed and not yet finished
    std::vector<std::pair<std::string, int>> waiting;  // (kernel, slot index)
  };

  KernelState& ensure_kernel(SimEngine& eng, const std::string& kernel);
  void dispatch_sample(SimEngine& eng, const std::string& kernel, int slot_idx);
  void place_sample(SimEngine& eng, const std::string& kernel, int slot_idx);
  void advance_cluster(SimEngine& eng, int cluster);
  void finalize_kernel(SimEngine& eng, const std::string& kernel);
  void place_steady(SimEngine& eng, TaskId t);
  void issue_requests(SimEngine& eng, const Configuration& cfg);
  double probe_freq(int stage) const;

  const GroundTruth* gt_;
  ModelSet models_;
  SchedOptions opt_;
  std::vector<CoreOption> options_;
  IdlePowerTable idle_;
  double fine_threshold_ = 0.0;

  std::map<std::string, KernelState> kernels_;
  std::map<TaskId, std::pair<std::string, int>> sample_owner_;
  std::vector<ClusterSampling> cs_;
  int sampling_kernels_ = 0;

  std::map<std::string, KernelTables> tables_;
  std::map<std::string, Configuration> chosen_;
  std::map<std::string, int> hints_;
  long cells_evaluated_ = 0;
  long steps_ = 0;
  int sampled_executions_ = 0;
  double sample_exec_s_ = 0.0;
  double total_exec_s_ = 0.0;
};

/// The full scheduler: joint core+memory DVFS (memory knob optional),
/// steepest-descent / constrained / max-performance selection goals.
class JossScheduler : public TableScheduler {
 public:
  JossScheduler(const GroundTruth& gt, ModelSet models, SchedOptions opt,
                bool mem_dvfs = true)
      : TableScheduler(gt, std::move(models), opt),
        goal_(opt.goal),
        mem_dvfs_(mem_dvfs) {}

  std::string name() const override { return mem_dvfs_ ? "joss" : "joss-nomem"; }

 protected:
  Configuration select_config(SearchContext& ctx, SearchStats& stats) override;
  bool uses_cluster_dvfs() const override { return true; }
  bool uses_mem_dvfs() const override { return mem_dvfs_; }

 private:
  SchedGoal goal_;
  bool mem_dvfs_;
};

}  // namespace joss
