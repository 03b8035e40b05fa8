#include "joss/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace joss {

void GrwsScheduler::task_ready(SimEngine& eng, TaskId t) {
  int core = eng.random_core();
  int cluster = eng.cluster_of_core(core);
  Configuration cfg{cluster, 1, eng.spec().clusters[cluster].core_freqs_ghz.back(),
                    eng.spec().max_mem_freq()};
  eng.place_task(t, cfg, core);
}

Configuration EraseLikeScheduler::select_config(SearchContext& ctx,
                                                SearchStats& stats) {
  int fm = ctx.n_fm() - 1;
  int best = 0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int o = 0; o < ctx.option_count(); ++o) {
    double e = ctx.cpu_energy_of(o, ctx.n_fc(o) - 1, fm);
    ++stats.cells_evaluated;
    if (e < best_e) {
      best = o;
      best_e = e;
    }
  }
  return ctx.make_config(best, ctx.n_fc(best) - 1, fm);
}

Configuration SteerLikeScheduler::select_config(SearchContext& ctx,
                                                SearchStats& stats) {
  int fm = ctx.n_fm() - 1;
  int best_o = 0, best_fc = 0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int o = 0; o < ctx.option_count(); ++o) {
    for (int fc = 0; fc < ctx.n_fc(o); ++fc) {
      double e = ctx.cpu_energy_of(o, fc, fm);
      ++stats.cells_evaluated;
      if (e < best_e) {
        best_o = o;
        best_fc = fc;
        best_e = e;
      }
    }
  }
  return ctx.make_config(best_o, best_fc, fm);
}

void AequitasLikeScheduler::start(SimEngine& eng) {
  net_steals_.assign(eng.spec().total_cores(), 0);
  eng.add_timer(0, slice_s_);
}

void AequitasLikeScheduler::task_ready(SimEngine& eng, TaskId t) {
  int core = eng.random_core();
  int cluster = eng.cluster_of_core(core);
  Configuration cfg{cluster, 1, eng.spec().clusters[cluster].core_freqs_ghz.back(),
                    eng.spec().max_mem_freq()};
  eng.place_task(t, cfg, core);
}

void AequitasLikeScheduler::stolen(SimEngine&, int thief_core, int victim_core) {
  ++net_steals_[thief_core];
  --net_steals_[victim_core];
}

int AequitasLikeScheduler::desired_step(SimEngine& eng, int core) const {
  if (net_steals_[core] > 0) return -1;
  if (static_cast<int>(eng.queue_length(core)) > queue_threshold_) return 1;
  return 0;
}

void AequitasLikeScheduler::timer_fired(SimEngine& eng, int) {
  int n = eng.spec().total_cores();
  int core = slice_core_;
  slice_core_ = (slice_core_ + 1) % n;
  int cluster = eng.cluster_of_core(core);
  const auto& ladder = eng.spec().clusters[cluster].core_freqs_ghz;
  double cur = eng.cluster_freq(cluster);
  int idx = static_cast<int>(std::find(ladder.begin(), ladder.end(), cur) -
                             ladder.begin());
  int next = std::clamp(idx + desired_step(eng, core), 0,
                        static_cast<int>(ladder.size()) - 1);
  if (next != idx) eng.request_cluster_freq(cluster, ladder[next]);
  net_steals_[core] = 0;  // each slice judges recent behaviour only
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& kind,
                                          const GroundTruth& gt,
                                          const ModelSet& models,
                                          const SchedOptions& opt) {
  if (kind == "grws") return std::make_unique<GrwsScheduler>();
  if (kind == "aequitas") return std::make_unique<AequitasLikeScheduler>();
  if (kind == "erase") return std::make_unique<EraseLikeScheduler>(gt, models, opt);
  if (kind == "steer") return std::make_unique<SteerLikeScheduler>(gt, models, opt);
  if (kind == "joss") return std::make_unique<JossScheduler>(gt, models, opt, true);
  if (kind == "joss-nomem")
    return std::make_unique<JossScheduler>(gt, models, opt, false);
  throw std::invalid_argument("unknown scheduler: " + kind);
}

const std::vector<std::string>& scheduler_names() {
  static const std::vector<std::string> names = {"grws",  "erase", "aequitas",
                                                 "steer", "joss",  "joss-nomem"};
  return names;
}

}  // namespace joss
