#include "joss/simengine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace joss {

namespace {
constexpr int kMemDomainId = 1 << 20;  // event id offset for the memory domain
}

SimEngine::SimEngine(const GroundTruth& gt, const TaskDAG& dag, std::uint64_t seed)
    : gt_(&gt), dag_(&dag), rng_(seed) {
  const auto& spec = gt.spec();
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    cluster_cores_.emplace_back();
    for (int i = 0; i < spec.clusters[c].core_count; ++i) {
      cluster_cores_[c].push_back(static_cast<int>(core_cluster_.size()));
      core_cluster_.push_back(c);
    }
    FreqDomain d;
    d.ladder = spec.clusters[c].core_freqs_ghz;
    d.current = d.ladder.back();  // highest before executing
    d.latency = spec.cpu_dvfs_latency_s;
    cluster_dom_.push_back(d);
  }
  mem_dom_.ladder = spec.mem_freqs_ghz;
  mem_dom_.current = mem_dom_.ladder.back();
  mem_dom_.latency = spec.mem_dvfs_latency_s;

  int n_cores = static_cast<int>(core_cluster_.size());
  queues_.resize(n_cores);
  busy_.assign(n_cores, false);
  wake_pending_.assign(n_cores, false);
  core_part_.assign(n_cores, -1);

  task_runs_.resize(dag.size());
  unresolved_preds_.resize(dag.size());
  for (const auto& t : dag.tasks())
    unresolved_preds_[t.id] = static_cast<int>(t.preds.size());
  successors_ = dag.successors();
  task_energy_j_.assign(dag.size(), 0.0);
  task_times_.resize(dag.size());
  next_sample_t_ = gt.spec().power_sample_period_s;
}

void SimEngine::push_event(double t, EventKind k, int id, long gen) {
  events_.push({t, k, id, gen});
}

Configuration SimEngine::live_config(const TaskRun& tr) const {
  Configuration cfg;
  cfg.cluster = tr.exec_cluster;
  cfg.n_cores = std::min(tr.cfg.n_cores, spec().clusters[tr.exec_cluster].core_count);
  cfg.f_c = cluster_dom_[tr.exec_cluster].current;
  cfg.f_m = mem_dom_.current;
  return cfg;
}

double SimEngine::partition_power_cpu(const Partition& p) const {
  const auto& tr = task_runs_[p.task];
  const auto& k = gt_->kernel(dag_->task(p.task).kernel);
  Configuration cfg{tr.exec_cluster, tr.parts_total, p.f_c_at, p.f_m_at};
  return gt_->cpu_power(k, cfg, gt_->mb_true(k, cfg)) / tr.parts_total;
}

double SimEngine::partition_power_mem(const Partition& p) const {
  const auto& tr = task_runs_[p.task];
  const auto& k = gt_->kernel(dag_->task(p.task).kernel);
  Configuration cfg{tr.exec_cluster, tr.parts_total, p.f_c_at, p.f_m_at};
  return gt_->mem_power_at(k, cfg) / tr.parts_total;
}

void SimEngine::advance_meter(double to) {
  double dt = to - meter_t_;
  if (dt <= 0.0) {
    meter_t_ = std::max(meter_t_, to);
    return;
  }
  // Idle breakdown.
  std::vector<double> cluster_idle(cluster_dom_.size());
  double idle_sum = 0.0;
  for (size_t c = 0; c < cluster_dom_.size(); ++c) {
    cluster_idle[c] = gt_->idle_cpu_power(static_cast<int>(c), cluster_dom_[c].current);
    idle_sum += cluster_idle[c];
  }
  double mem_idle = gt_->idle_mem_power(mem_dom_.current);
  idle_sum += mem_idle;

  // Dynamic power and per-task usage.
  std::vector<RunningTaskUsage> usage;
  std::map<TaskId, double> task_dyn_w;
  double dyn_cpu = 0.0, dyn_mem = 0.0;
  for (size_t core = 0; core < busy_.size(); ++core) {
    if (!busy_[core]) continue;
    const Partition& p = partitions_[core_part_[core]];
    double pc = partition_power_cpu(p);
    double pm = partition_power_mem(p);
    dyn_cpu += pc;
    dyn_mem += pm;
    task_dyn_w[p.task] += pc + pm;
    bool found = false;
    for (auto& u : usage) {
      if (u.task == p.task) {
        ++u.cores;
        found = true;
        break;
      }
    }
    if (!found) usage.push_back({p.task, task_runs_[p.task].exec_cluster, 1});
  }
  auto shares = attribute_idle(cluster_idle, mem_idle, usage);

  cpu_j_ += (idle_sum - mem_idle + dyn_cpu) * dt;
  mem_j_ += (mem_idle + dyn_mem) * dt;
  idle_j_ += idle_sum * dt;
  unattributed_j_ += shares.unattributed_w * dt;
  for (const auto& [task, w] : shares.per_task_w) task_energy_j_[task] += w * dt;
  for (const auto& [task, w] : task_dyn_w) task_energy_j_[task] += w * dt;

  if (sampled_meter_) {
    // Piecewise-constant power makes boundary sampling exact per sample.
    double period = spec().power_sample_period_s;
    while (next_sample_t_ <= to + 1e-18) {
      if (next_sample_t_ > meter_t_) {
        sampled_cpu_j_ += (idle_sum - mem_idle + dyn_cpu) * period;
        sampled_mem_j_ += (mem_idle + dyn_mem) * period;
      }
      next_sample_t_ += period;
    }
  }
  meter_t_ = to;
}

int SimEngine::running_tasks() const {
  int n = 0;
  for (const auto& tr : task_runs_)
    if (tr.parts_running > 0) ++n;
  return n;
}

int SimEngine::running_tasks_on_cluster(int cluster) const {
  int n = 0;
  for (const auto& tr : task_runs_)
    if (tr.parts_running > 0 && tr.exec_cluster == cluster) ++n;
  return n;
}

int SimEngine::cores_in_use(TaskId t) const {
  int n = 0;
  for (size_t core = 0; core < busy_.size(); ++core)
    if (busy_[core] && partitions_[core_part_[core]].task == t) ++n;
  return n;
}

int SimEngine::queued_kernel_tasks(int cluster, const std::string& kernel) const {
  int n = 0;
  for (int core : cluster_cores_[cluster])
    for (const auto& item : queues_[core])
      if (item.partition < 0 && dag_->task(item.task).kernel == kernel) ++n;
  return n;
}

int SimEngine::random_core_of_cluster(int cluster) {
  const auto& cores = cluster_cores_.at(cluster);
  std::uniform_int_distribution<size_t> d(0, cores.size() - 1);
  return cores[d(rng_)];
}

int SimEngine::random_core() {
  std::uniform_int_distribution<size_t> d(0, core_cluster_.size() - 1);
  return static_cast<int>(d(rng_));
}

void SimEngine::place_task(TaskId t, const Configuration& cfg, int core) {
  if (core < 0 || core >= static_cast<int>(queues_.size()))
    throw std::invalid_argument("place_task: bad core");
  task_runs_[t].cfg = cfg;
  queues_[core].push_back({t, -1});
  trace_line("place", core, t);
  if (sched_ && sched_->cross_cluster_steal() && cfg.n_cores == 1)
    wake_idle_cores(-1);
  else
    wake_idle_cores(core_cluster_[core]);
}

void SimEngine::wake_idle_cores(int cluster) {
  for (size_t core = 0; core < busy_.size(); ++core) {
    if (busy_[core] || wake_pending_[core]) continue;
    if (cluster >= 0 && core_cluster_[core] != cluster) continue;
    wake_pending_[core] = true;
    push_event(now_, EventKind::Steal, static_cast<int>(core), 0);
  }
}

void SimEngine::request_cluster_freq(int cluster, double ghz) {
  auto& d = cluster_dom_.at(cluster);
  if (std::find(d.ladder.begin(), d.ladder.end(), ghz) == d.ladder.end())
    throw std::invalid_argument("request_cluster_freq: value not in ladder");
  if (d.pending) {
    d.pending_target = ghz;  // latest target applies at completion
    return;
  }
  if (ghz == d.current) return;
  d.pending = true;
  d.pending_target = ghz;
  ++d.gen;
  push_event(now_ + d.latency, EventKind::FreqTransitionDone, cluster, d.gen);
}

void SimEngine::request_mem_freq(double ghz) {
  auto& d = mem_dom_;
  if (std::find(d.ladder.begin(), d.ladder.end(), ghz) == d.ladder.end())
    throw std::invalid_argument("request_mem_freq: value not in ladder");
  if (d.pending) {
    d.pending_target = ghz;
    return;
  }
  if (ghz == d.current) return;
  d.pending = true;
  d.pending_target = ghz;
  ++d.gen;
  push_event(now_ + d.latency, EventKind::FreqTransitionDone, kMemDomainId, d.gen);
}

void SimEngine::add_timer(int timer_id, double period_s) {
  timer_period_[timer_id] = period_s;
  push_event(now_ + period_s, EventKind::SampleBoundary, timer_id, 0);
}

void SimEngine::reschedule_partition(Partition& p) {
  ++p.gen;
  push_event(now_ + p.comp_rem + p.stall_rem, EventKind::PartitionDone,
             p.id, p.gen);
}

void SimEngine::rescale_partitions_on(int cluster) {
  for (size_t core = 0; core < busy_.size(); ++core) {
    if (!busy_[core]) continue;
    Partition& p = partitions_[core_part_[core]];
    const auto& tr = task_runs_[p.task];
    if (cluster >= 0 && tr.exec_cluster != cluster) continue;
    // Consume elapsed time proportionally across comp and stall.
    double elapsed = now_ - p.last_update;
    double tot = p.comp_rem + p.stall_rem;
    if (tot > 0.0 && elapsed > 0.0) {
      double rem = std::max(0.0, 1.0 - elapsed / tot);
      p.comp_rem *= rem;
      p.stall_rem *= rem;
    }
    p.last_update = now_;
    // Rescale remaining work to the new frequencies.
    const auto& k = gt_->kernel(dag_->task(p.task).kernel);
    double f_c_new = cluster_dom_[tr.exec_cluster].current;
    double f_m_new = mem_dom_.current;
    if (p.comp_rem > 0.0) p.comp_rem *= p.f_c_at / f_c_new;
    if (p.stall_rem > 0.0) {
      Configuration oldc{tr.exec_cluster, tr.parts_total, p.f_c_at, p.f_m_at};
      Configuration newc{tr.exec_cluster, tr.parts_total, f_c_new, f_m_new};
      p.stall_rem *= gt_->stall_time(k, newc) / gt_->stall_time(k, oldc);
    }
    p.f_c_at = f_c_new;
    p.f_m_at = f_m_new;
    reschedule_partition(p);
  }
}

void SimEngine::expand_task(TaskId t, int core, Scheduler& sched) {
  TaskRun& tr = task_runs_[t];
  tr.expanded = true;
  tr.exec_cluster = core_cluster_[core];
  tr.parts_total = std::min(tr.cfg.n_cores, spec().clusters[tr.exec_cluster].core_count);
  int first_pid = static_cast<int>(partitions_.size());
  for (int i = 0; i < tr.parts_total; ++i) {
    Partition p;
    p.id = first_pid + i;
    p.task = t;
    p.index = i;
    partitions_.push_back(p);
  }
  // Remaining partitions go round-robin to the other cores of the cluster.
  const auto& cores = cluster_cores_[tr.exec_cluster];
  size_t self_pos = std::find(cores.begin(), cores.end(), core) - cores.begin();
  for (int i = 1; i < tr.parts_total; ++i) {
    int target = cores[(self_pos + i) % cores.size()];
    queues_[target].push_back({t, first_pid + i});
  }
  if (tr.parts_total > 1) wake_idle_cores(tr.exec_cluster);
  start_partition(first_pid, core, sched);
}

void SimEngine::start_partition(int part_id, int core, Scheduler& sched) {
  Partition& p = partitions_[part_id];
  TaskRun& tr = task_runs_[p.task];
  busy_[core] = true;
  core_part_[core] = part_id;
  p.core = core;
  p.start_time = now_;
  p.last_update = now_;
  if (!tr.started) {
    tr.started = true;
    task_times_[p.task].first_start = now_;
    sched.task_started(*this, p.task);
  }
  ++tr.parts_running;
  const auto& k = gt_->kernel(dag_->task(p.task).kernel);
  Configuration cfg = live_config(tr);
  double noise = gt_->noise_factor(k, cfg);
  p.comp_rem = gt_->comp_time(k, cfg) * noise;
  p.stall_rem = gt_->stall_time(k, cfg) * noise;
  p.f_c_at = cfg.f_c;
  p.f_m_at = cfg.f_m;
  trace_line("start", core, p.task);
  reschedule_partition(p);
}

void SimEngine::core_fetch_work(int core, bool) {
  if (busy_[core]) return;
  // Own queue first, newest entry.
  if (!queues_[core].empty()) {
    WorkItem item = queues_[core].back();
    queues_[core].pop_back();
    if (item.partition < 0)
      expand_task(item.task, core, *sched_);
    else
      start_partition(item.partition, core, *sched_);
    return;
  }
  // Steal: oldest entry of a random eligible victim.
  bool cross = sched_->cross_cluster_steal();
  std::vector<int> victims;
  for (size_t v = 0; v < queues_.size(); ++v) {
    if (static_cast<int>(v) == core || queues_[v].empty()) continue;
    const WorkItem& front = queues_[v].front();
    bool same_cluster = core_cluster_[v] == core_cluster_[core];
    bool whole_single = front.partition < 0 && task_runs_[front.task].cfg.n_cores == 1;
    if (same_cluster || (cross && whole_single)) victims.push_back(static_cast<int>(v));
  }
  if (victims.empty()) return;  // stay idle until woken
  std::uniform_int_distribution<size_t> d(0, victims.size() - 1);
  int victim = victims[d(rng_)];
  WorkItem item = queues_[victim].front();
  queues_[victim].pop_front();
  sched_->stolen(*this, core, victim);
  trace_line("steal", core, item.task);
  if (item.partition < 0)
    expand_task(item.task, core, *sched_);
  else
    start_partition(item.partition, core, *sched_);
}

void SimEngine::on_partition_done(int part_id, Scheduler& sched) {
  Partition& p = partitions_[part_id];
  TaskRun& tr = task_runs_[p.task];
  p.done = true;
  p.comp_rem = p.stall_rem = 0.0;
  int core = p.core;
  busy_[core] = false;
  core_part_[core] = -1;
  --tr.parts_running;
  ++tr.parts_done;
  trace_line("done", core, p.task);
  if (tr.parts_done == tr.parts_total) {
    ++executed_;
    last_completion_ = now_;
    task_times_[p.task].completion = now_;
    sched.task_finished(*this, p.task, now_ - p.start_time);
    // Successors become ready strictly at the last partition's end.
    for (TaskId s : successors_[p.task]) {
      if (--unresolved_preds_[s] == 0) sched.task_ready(*this, s);
    }
  }
  core_fetch_work(core, false);
}

void SimEngine::on_freq_done(int domain, Scheduler& sched) {
  if (domain == kMemDomainId) {
    mem_dom_.pending = false;
    mem_dom_.current = mem_dom_.pending_target;
    rescale_partitions_on(-1);
    sched.freq_changed(*this, -1);
  } else {
    auto& d = cluster_dom_[domain];
    d.pending = false;
    d.current = d.pending_target;
    rescale_partitions_on(domain);
    sched.freq_changed(*this, domain);
  }
}

void SimEngine::trace_line(const std::string& kind, int core, TaskId task) {
  if (!trace_) return;
  int cl = core >= 0 ? core_cluster_[core] : -1;
  std::ostringstream os;
  os << now_ << ' ' << kind << ' ' << core << ' ' << cl << ' '
     << (cl >= 0 ? cluster_dom_[cl].current : 0.0) << ' ' << mem_dom_.current << ' '
     << task;
  trace_->push_back(os.str());
}

RunReport SimEngine::run(Scheduler& sched) {
  dag_->validate();
  sched_ = &sched;
  RunReport report;
  report.scheduler = sched.name();
  if (dag_->empty()) {
    sched.finalize_report(*this, report);
    return report;
  }
  sched.start(*this);
  for (const auto& t : dag_->tasks())
    if (unresolved_preds_[t.id] == 0) sched.task_ready(*this, t.id);

  while (!events_.empty() && executed_ < static_cast<int>(dag_->size())) {
    Event ev = events_.top();
    events_.pop();
    // Staleness checks.
    if (ev.kind == EventKind::PartitionDone) {
      const Partition& p = partitions_[ev.id];
      if (p.done || p.core < 0 || ev.gen != p.gen) continue;
    } else if (ev.kind == EventKind::FreqTransitionDone) {
      const FreqDomain& d =
          (ev.id == kMemDomainId) ? mem_dom_ : cluster_dom_[ev.id];
      if (!d.pending || ev.gen != d.gen) continue;
    }
    advance_meter(ev.time);
    now_ = ev.time;
    switch (ev.kind) {
      case EventKind::PartitionDone:
        on_partition_done(ev.id, sched);
        break;
      case EventKind::FreqTransitionDone:
        on_freq_done(ev.id, sched);
        break;
      case EventKind::SampleBoundary: {
        sched.timer_fired(*this, ev.id);
        auto it = timer_period_.find(ev.id);
        if (it != timer_period_.end())
          push_event(now_ + it->second, EventKind::SampleBoundary, ev.id, 0);
        break;
      }
      case EventKind::Steal:
        wake_pending_[ev.id] = false;
        core_fetch_work(ev.id, true);
        break;
    }
  }
  if (executed_ < static_cast<int>(dag_->size()))
    throw std::runtime_error("simulation deadlocked with " +
                             std::to_string(dag_->size() - executed_) +
                             " tasks unexecuted");

  report.makespan_s = last_completion_;
  report.cpu_j = cpu_j_;
  report.mem_j = mem_j_;
  report.idle_j = idle_j_;
  report.unattributed_idle_j = unattributed_j_;
  for (double e : task_energy_j_) report.attributed_j += e;
  if (sampled_meter_) {
    report.sampled_cpu_j = sampled_cpu_j_;
    report.sampled_mem_j = sampled_mem_j_;
  }
  report.tasks_executed = executed_;
  sched.finalize_report(*this, report);
  return report;
}

}  // namespace joss
