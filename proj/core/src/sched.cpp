#include "joss/sched.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace joss {

SchedGoal parse_goal(const std::string& text) {
  SchedGoal g;
  if (text == "min_energy") {
    g.kind = GoalKind::MinEnergy;
  } else if (text == "max_perf") {
    g.kind = GoalKind::MaxPerf;
  } else if (text.rfind("speedup:", 0) == 0) {
    g.kind = GoalKind::Constrained;
    g.speedup_target = std::stod(text.substr(8));
    if (g.speedup_target < 1.0)
      throw std::invalid_argument("goal: speedup target must be >= 1");
  } else {
    throw std::invalid_argument("goal: expected min_energy | speedup:<x> | max_perf");
  }
  return g;
}

double coordinate_frequency(double requested_ghz, double current_ghz,
                            int other_running, const std::vector<double>& ladder) {
  if (ladder.empty()) throw std::invalid_argument("coordinate_frequency: empty ladder");
  if (other_running <= 0) return requested_ghz;
  double mean = 0.5 * (requested_ghz + current_ghz);
  double best = ladder.front();
  for (double f : ladder) {
    double d = std::abs(f - mean), bd = std::abs(best - mean);
    if (d < bd) best = f;  // ties keep the earlier (lower) ladder value
  }
  return best;
}

KernelTables oracle_tables(const GroundTruth& gt, const std::string& kernel) {
  const auto& spec = gt.spec();
  const auto& k = gt.kernel(kernel);
  auto options = core_option_list(spec);
  KernelTables t;
  t.kernel = kernel;
  int n_fm = static_cast<int>(spec.mem_freqs_ghz.size());
  for (const auto& o : options) {
    const auto& fcs = spec.clusters[o.cluster].core_freqs_ghz;
    FreqGrid time, cpu, mem;
    time.cells.resize(fcs.size() * n_fm);
    time.measured.assign(fcs.size() * n_fm, 0);
    cpu = time;
    mem = time;
    for (size_t fc = 0; fc < fcs.size(); ++fc) {
      for (int fm = 0; fm < n_fm; ++fm) {
        Configuration cfg{o.cluster, o.n_cores, fcs[fc], spec.mem_freqs_ghz[fm]};
        size_t i = fc * n_fm + fm;
        time.cells[i] = gt.time(k, cfg);
        cpu.cells[i] = gt.cpu_power_at(k, cfg);
        mem.cells[i] = gt.mem_power_at(k, cfg);
      }
    }
    t.time_s.push_back(std::move(time));
    t.cpu_w.push_back(std::move(cpu));
    t.mem_w.push_back(std::move(mem));
  }
  return t;
}

TableScheduler::TableScheduler(const GroundTruth& gt, ModelSet models,
                               SchedOptions opt)
    : gt_(&gt),
      models_(std::move(models)),
      opt_(opt),
      options_(core_option_list(gt.spec())),
      idle_(measure_idle(gt)) {
  fine_threshold_ = opt_.fine_grain_threshold_s >= 0.0
                        ? opt_.fine_grain_threshold_s
                        : 10.0 * gt.spec().cpu_dvfs_latency_s;
}

double TableScheduler::probe_freq(int stage) const {
  return stage == 0 ? models_.sampling.f_c_ref : models_.sampling.f_c_prime;
}

void TableScheduler::start(SimEngine& eng) {
  cs_.assign(spec().clusters.size(), {});
  for (size_t c = 0; c < cs_.size(); ++c) cs_[c].freq = eng.cluster_freq(static_cast<int>(c));
}

TableScheduler::KernelState& TableScheduler::ensure_kernel(SimEngine& eng,
                                                           const std::string& kernel) {
  auto it = kernels_.find(kernel);
  if (it != kernels_.end()) return it->second;
  KernelState ks;
  int instances = eng.dag().kernel_instances(kernel);
  // Probe every core option at both frequencies, in stage order so each
  // cluster switches down only once; capped by the instance budget.
  int budget = instances;
  for (int stage = 0; stage < 2 && budget > 0; ++stage) {
    for (int o = 0; o < static_cast<int>(options_.size()) && budget > 0; ++o) {
      ks.slots.push_back({o, stage});
      --budget;
    }
  }
  ++sampling_kernels_;
  return kernels_.emplace(kernel, std::move(ks)).first->second;
}

void TableScheduler::task_ready(SimEngine& eng, TaskId t) {
  const std::string& kernel = eng.dag().task(t).kernel;
  KernelState& ks = ensure_kernel(eng, kernel);
  if (ks.steady) {
    place_steady(eng, t);
    return;
  }
  if (ks.next_slot < ks.slots.size()) {
    int idx = static_cast<int>(ks.next_slot++);
    ks.slots[idx].task = t;
    sample_owner_[t] = {kernel, idx};
    dispatch_sample(eng, kernel, idx);
  } else {
    // Sampling in flight; hold further instances for the selected config.
    ks.deferred.push_back(t);
  }
}

void TableScheduler::dispatch_sample(SimEngine& eng, const std::string& kernel,
                                     int slot_idx) {
  const SampleSlot& slot = kernels_[kernel].slots[slot_idx];
  int cluster = options_[slot.option].cluster;
  ClusterSampling& cs = cs_[cluster];
  if (!cs.transitioning && cs.freq == probe_freq(slot.stage)) {
    place_sample(eng, kernel, slot_idx);
  } else {
    cs.waiting.emplace_back(kernel, slot_idx);
    advance_cluster(eng, cluster);
  }
}

void TableScheduler::place_sample(SimEngine& eng, const std::string& kernel,
                                  int slot_idx) {
  const SampleSlot& slot = kernels_[kernel].slots[slot_idx];
  const CoreOption& o = options_[slot.option];
  Configuration cfg{o.cluster, o.n_cores, probe_freq(slot.stage),
                    models_.sampling.f_m_ref};
  ++cs_[o.cluster].active;
  ++sampled_executions_;
  eng.place_task(slot.task, cfg, eng.random_core_of_cluster(o.cluster));
}

void TableScheduler::advance_cluster(SimEngine& eng, int cluster) {
  ClusterSampling& cs = cs_[cluster];
  if (cs.transitioning) return;
  // Place every waiting sample already matching the committed frequency.
  for (size_t i = 0; i < cs.waiting.size();) {
    auto [kernel, idx] = cs.waiting[i];
    if (probe_freq(kernels_[kernel].slots[idx].stage) == cs.freq) {
      cs.waiting.erase(cs.waiting.begin() + i);
      place_sample(eng, kernel, idx);
    } else {
      ++i;
    }
  }
  if (cs.waiting.empty()) return;
  // The rest need the other probe point; switch once in-flight samples drain.
  if (cs.active > 0) return;
  double required = probe_freq(kernels_[cs.waiting.front().first]
                                   .slots[cs.waiting.front().second]
                                   .stage);
  if (!eng.cluster_freq_pending(cluster) && eng.cluster_freq(cluster) == required) {
    cs.freq = required;
    advance_cluster(eng, cluster);
    return;
  }
  cs.transitioning = true;
  eng.request_cluster_freq(cluster, required);
}

void TableScheduler::freq_changed(SimEngine& eng, int domain) {
  if (domain < 0 || cs_.empty()) return;
  ClusterSampling& cs = cs_[domain];
  if (!cs.transitioning) return;
  cs.transitioning = false;
  cs.freq = eng.cluster_freq(domain);
  advance_cluster(eng, domain);
}

void TableScheduler::task_finished(SimEngine& eng, TaskId t, double exec_seconds) {
  total_exec_s_ += exec_seconds;
  auto it = sample_owner_.find(t);
  if (it == sample_owner_.end()) return;
  auto [kernel, idx] = it->second;
  sample_owner_.erase(it);
  sample_exec_s_ += exec_seconds;
  KernelState& ks = kernels_[kernel];
  ks.slots[idx].time_s = exec_seconds;
  ++ks.slots_done;
  int cluster = options_[ks.slots[idx].option].cluster;
  --cs_[cluster].active;
  if (ks.slots_done == static_cast<int>(ks.slots.size())) finalize_kernel(eng, kernel);
  advance_cluster(eng, cluster);
}

void TableScheduler::finalize_kernel(SimEngine& eng, const std::string& kernel) {
  KernelState& ks = kernels_[kernel];
  KernelProfile profile(kernel, options_.size());
  for (const auto& slot : ks.slots) {
    if (slot.time_s <= 0.0) continue;
    auto& dst = slot.stage == 0 ? profile.time_at_fc : profile.time_at_fc_prime;
    dst[slot.option] = slot.time_s;
  }
  // Instance-starved kernels: reuse the last sampled time for uncovered
  // options; a missing second probe defaults the memory-boundness and the
  // low-frequency time is reconstructed from it.
  double last = 0.0;
  double ratio = models_.sampling.f_c_ref / models_.sampling.f_c_prime;
  for (size_t o = 0; o < options_.size(); ++o) {
    if (profile.time_at_fc[o] > 0.0)
      last = profile.time_at_fc[o];
    else
      profile.time_at_fc[o] = last;
    if (profile.time_at_fc[o] > 0.0 && profile.time_at_fc_prime[o] > 0.0 &&
        models_.sampling.f_c_ref != models_.sampling.f_c_prime) {
      profile.mb[o] = estimate_mb(profile.time_at_fc[o], profile.time_at_fc_prime[o],
                                  models_.sampling.f_c_ref, models_.sampling.f_c_prime);
    } else {
      profile.mb[o] = 0.5;
      profile.mb_defaulted = true;
      profile.time_at_fc_prime[o] =
          profile.time_at_fc[o] * (profile.mb[o] + (1.0 - profile.mb[o]) * ratio);
    }
  }

  tables_[kernel] = opt_.oracle_tables ? oracle_tables(*gt_, kernel)
                                       : build_tables(profile, models_, spec());
  int hint = std::max(1, eng.running_tasks());
  SearchContext ctx(spec(), tables_[kernel], idle_, hint);
  if (!uses_mem_dvfs())
    ctx.lock_fm(static_cast<int>(spec().mem_freqs_ghz.size()) - 1);
  SearchStats stats;
  ks.chosen = select_config(ctx, stats);
  chosen_[kernel] = ks.chosen;
  hints_[kernel] = hint;
  cells_evaluated_ += stats.cells_evaluated;
  steps_ += stats.steps;

  int one_core = core_option_index(spec(), ks.chosen.cluster, 1);
  double t1 = profile.time_at_fc[one_core];
  ks.fine = t1 > 0.0 && t1 < fine_threshold_;

  ks.steady = true;
  --sampling_kernels_;
  // Schedulers without a DVFS policy of their own run at the maximums once
  // sampling no longer needs the probe frequencies.
  if (sampling_kernels_ == 0 && !uses_cluster_dvfs()) {
    for (size_t c = 0; c < cs_.size(); ++c)
      if (cs_[c].waiting.empty() && !cs_[c].transitioning)
        eng.request_cluster_freq(static_cast<int>(c),
                                 spec().clusters[c].core_freqs_ghz.back());
  }
  std::vector<TaskId> deferred;
  deferred.swap(ks.deferred);
  for (TaskId t : deferred) place_steady(eng, t);
}

void TableScheduler::place_steady(SimEngine& eng, TaskId t) {
  const std::string& kernel = eng.dag().task(t).kernel;
  KernelState& ks = kernels_[kernel];
  const Configuration& cfg = ks.chosen;
  eng.place_task(t, cfg, eng.random_core_of_cluster(cfg.cluster));
  if (!ks.fine) return;  // coarse tasks request at start time instead
  if (!uses_cluster_dvfs() && !uses_mem_dvfs()) return;
  if (ks.covered_remaining > 0) {
    --ks.covered_remaining;
    return;
  }
  // Group leader: scan this cluster's queues for enough same-kernel work to
  // amortize one DVFS decision; below the group size, run without throttling.
  int collected = eng.queued_kernel_tasks(cfg.cluster, kernel);
  if (collected >= opt_.min_group) {
    issue_requests(eng, cfg);
    ks.covered_remaining = opt_.min_group - 1;
    ++ks.groups;
  }
}

void TableScheduler::task_started(SimEngine& eng, TaskId t) {
  if (sample_owner_.count(t)) return;
  const std::string& kernel = eng.dag().task(t).kernel;
  auto it = kernels_.find(kernel);
  if (it == kernels_.end() || !it->second.steady || it->second.fine) return;
  issue_requests(eng, it->second.chosen);
}

void TableScheduler::issue_requests(SimEngine& eng, const Configuration& cfg) {
  // Sampling owns the knobs: concurrent steady tasks run at the probe
  // frequencies until every known kernel has been profiled.
  if (sampling_kernels_ > 0) return;
  if (uses_cluster_dvfs()) {
    int others = eng.running_tasks_on_cluster(cfg.cluster);
    double f = coordinate_frequency(cfg.f_c, eng.cluster_freq(cfg.cluster), others,
                                    spec().clusters[cfg.cluster].core_freqs_ghz);
    eng.request_cluster_freq(cfg.cluster, f);
  }
  if (uses_mem_dvfs()) {
    int others = eng.running_tasks();
    double f = coordinate_frequency(cfg.f_m, eng.mem_freq(), others,
                                    spec().mem_freqs_ghz);
    eng.request_mem_freq(f);
  }
}

int TableScheduler::groups_formed(const std::string& kernel) const {
  auto it = kernels_.find(kernel);
  return it == kernels_.end() ? 0 : it->second.groups;
}

void TableScheduler::finalize_report(SimEngine&, RunReport& report) {
  report.kernel_configs = chosen_;
  report.kernel_selection_hints = hints_;
  report.search_cells_evaluated = cells_evaluated_;
  report.search_steps = steps_;
  report.sampling_overhead_fraction =
      total_exec_s_ > 0.0 ? sample_exec_s_ / total_exec_s_ : 0.0;
}

Configuration JossScheduler::select_config(SearchContext& ctx, SearchStats& stats) {
  switch (goal_.kind) {
    case GoalKind::MinEnergy: {
      auto [cfg, s] = steepest_descent_min_energy(ctx);
      stats = s;
      return cfg;
    }
    case GoalKind::Constrained: {
      auto [cfg, s] = constrained_min_energy(ctx, goal_.speedup_target);
      stats = s;
      return cfg;
    }
    case GoalKind::MaxPerf: {
      auto [cfg, s] = max_perf_config(ctx);
      stats = s;
      return cfg;
    }
  }
  throw std::logic_error("unreachable goal kind");
}

}  // namespace joss
