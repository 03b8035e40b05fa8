#pragma once

#include <memory>
#include <string>
#include <vector>

#include "joss/sched.hpp"

namespace joss {

/// Greedy random work stealing: single-core tasks, random placement, stealing
/// across clusters, every frequency pinned at its maximum.
class GrwsScheduler : public Scheduler {
 public:
  std::string name() const override { return "grws"; }
  bool cross_cluster_steal() const override { return true; }
  void task_ready(SimEngine& eng, TaskId t) override;
};

/// Picks the (cluster, n_cores) minimizing predicted CPU-only energy at
/// maximum frequencies; never touches a DVFS knob.
class EraseLikeScheduler : public TableScheduler {
 public:
  using TableScheduler::TableScheduler;
  std::string name() const override { return "erase"; }

 protected:
  Configuration select_config(SearchContext& ctx, SearchStats& stats) override;
  bool uses_cluster_dvfs() const override { return false; }
  bool uses_mem_dvfs() const override { return false; }
};

/// Picks the (cluster, n_cores, f_C) minimizing predicted CPU-only energy;
/// the memory frequency stays pinned at maximum.
class SteerLikeScheduler : public TableScheduler {
 public:
  using TableScheduler::TableScheduler;
  std::string name() const override { return "steer"; }

 protected:
  Configuration select_config(SearchContext& ctx, SearchStats& stats) override;
  bool uses_cluster_dvfs() const override { return true; }
  bool uses_mem_dvfs() const override { return false; }
};

/// Work stealing with per-core frequency tuning: a net-thief core wants one
/// ladder step down, a core with a long queue one step up; each core applies
/// its wish to its cluster in 1 s round-robin slices. No memory DVFS.
class AequitasLikeScheduler : public Scheduler {
 public:
  explicit AequitasLikeScheduler(int queue_threshold = 4, double slice_s = 1.0)
      : queue_threshold_(queue_threshold), slice_s_(slice_s) {}

  std::string name() const override { return "aequitas"; }
  bool cross_cluster_steal() const override { return true; }
  void start(SimEngine& eng) override;
  void task_ready(SimEngine& eng, TaskId t) override;
  void stolen(SimEngine& eng, int thief_core, int victim_core) override;
  void timer_fired(SimEngine& eng, int timer_id) override;

  int desired_step(SimEngine& eng, int core) const;  // -1 | 0 | +1

 private:
  int queue_threshold_;
  double slice_s_;
  std::vector<int> net_steals_;
  int slice_core_ = 0;
};

/// One of {grws, erase, aequitas, steer, joss, joss-nomem}.
std::unique_ptr<Scheduler> make_scheduler(const std::string& kind,
                                          const GroundTruth& gt,
                                          const ModelSet& models,
                                          const SchedOptions& opt);
const std::vector<std::string>& scheduler_names();

}  // namespace joss
