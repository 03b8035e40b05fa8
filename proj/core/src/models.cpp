#include "joss/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace joss {

namespace {
constexpr double kMinTime = 1e-6;   // floor for extrapolated time predictions
constexpr double kMinPower = 1e-9;  // tables must stay strictly positive
}  // namespace

std::vector<CoreOption> core_option_list(const PlatformSpec& spec) {
  std::vector<CoreOption> opts;
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c)
    for (int n : spec.clusters[c].allowed_core_counts()) opts.push_back({c, n});
  return opts;
}

int core_option_index(const PlatformSpec& spec, int cluster, int n_cores) {
  auto opts = core_option_list(spec);
  for (int i = 0; i < static_cast<int>(opts.size()); ++i)
    if (opts[i].cluster == cluster && opts[i].n_cores == n_cores) return i;
  throw std::invalid_argument("no core option (" + std::to_string(cluster) + ", " +
                              std::to_string(n_cores) + ")");
}

double estimate_mb(double time_at_fc, double time_at_fc_prime, double f_c,
                   double f_c_prime) {
  if (f_c == f_c_prime)
    throw std::invalid_argument("estimate_mb: sampling frequencies must differ");
  if (time_at_fc <= 0.0 || time_at_fc_prime <= 0.0)
    throw std::invalid_argument("estimate_mb: times must be positive");
  double ratio = f_c / f_c_prime;
  double mb = (time_at_fc_prime / time_at_fc - ratio) / (1.0 - ratio);
  return std::clamp(mb, 0.0, 1.0);
}

double predict_time(double profile_time, double mb, double f_c, double f_c_prime,
                    double f_m, double f_m_prime, const MprModel& stall_model) {
  if (mb < 0.0 || mb > 1.0) throw std::invalid_argument("predict_time: mb outside [0,1]");
  double comp = profile_time * (1.0 - mb) * (f_c / f_c_prime);
  double x[3] = {mb, f_c / f_c_prime, f_m / f_m_prime};
  double stall = profile_time * stall_model.predict(x);
  return std::max(comp + stall, kMinTime);
}

double predict_cpu_power(double mb, double f_c, const MprModel& model) {
  if (mb < 0.0 || mb > 1.0) throw std::invalid_argument("predict_cpu_power: mb outside [0,1]");
  double x[2] = {mb, f_c};
  return model.predict(x);
}

double predict_mem_power(double mb, double f_c, double f_m, const MprModel& model) {
  if (mb < 0.0 || mb > 1.0) throw std::invalid_argument("predict_mem_power: mb outside [0,1]");
  double x[3] = {mb, f_c, f_m};
  return model.predict(x);
}

double accuracy(double real, double predicted) {
  if (real <= 0.0) throw std::invalid_argument("accuracy: real must be > 0");
  return 1.0 - std::abs(real - predicted) / real;
}

SamplingPoints default_sampling_points(const PlatformSpec& spec) {
  const auto& ladder = spec.clusters.front().core_freqs_ghz;
  SamplingPoints sp;
  sp.f_c_ref = ladder.back();
  // Prefer the paper-named 1.11 GHz when present, otherwise the ladder
  // minimum; the wide gap keeps the Eq. 3 denominator well away from zero.
  sp.f_c_prime = ladder.front();
  for (double f : ladder)
    if (std::abs(f - 1.11) < 1e-9) sp.f_c_prime = f;
  sp.f_m_ref = spec.mem_freqs_ghz.back();
  return sp;
}

size_t KernelTables::entry_count() const {
  size_t n = 0;
  for (const auto& g : time_s) n += g.cells.size();
  for (const auto& g : cpu_w) n += g.cells.size();
  for (const auto& g : mem_w) n += g.cells.size();
  return n;
}

int KernelTables::measured_count() const {
  int n = 0;
  auto count = [&n](const std::vector<FreqGrid>& grids) {
    for (const auto& g : grids)
      for (auto m : g.measured) n += (m != 0);
  };
  count(time_s);
  count(cpu_w);
  count(mem_w);
  return n;
}

IdlePowerTable measure_idle(const GroundTruth& gt) {
  const auto& spec = gt.spec();
  IdlePowerTable t;
  t.cpu_idle_w.resize(spec.clusters.size());
  for (size_t c = 0; c < spec.clusters.size(); ++c)
    for (double f : spec.clusters[c].core_freqs_ghz)
      t.cpu_idle_w[c].push_back(gt.idle_cpu_power(static_cast<int>(c), f));
  for (double f : spec.mem_freqs_ghz) t.mem_idle_w.push_back(gt.idle_mem_power(f));
  return t;
}

std::vector<ProfileRow> profile_grid(const GroundTruth& gt,
                                     const std::vector<KernelParams>& kernels) {
  const auto& spec = gt.spec();
  std::vector<ProfileRow> rows;
  for (const auto& k : kernels) {
    for (const auto& opt : core_option_list(spec)) {
      for (double fc : spec.clusters[opt.cluster].core_freqs_ghz) {
        for (double fm : spec.mem_freqs_ghz) {
          Configuration cfg{opt.cluster, opt.n_cores, fc, fm};
          rows.push_back({k.name, opt.cluster, opt.n_cores, fc, fm,
                          gt.time(k, cfg), gt.cpu_power_at(k, cfg),
                          gt.mem_power_at(k, cfg)});
        }
      }
    }
  }
  return rows;
}

ModelSet fit_models(const PlatformSpec& spec, const std::vector<ProfileRow>& rows,
                    const SamplingPoints& sampling) {
  auto opts = core_option_list(spec);
  ModelSet set;
  set.sampling = sampling;
  set.options.resize(opts.size());

  // Index rows per (option, kernel) for reference lookups.
  struct Key {
    int opt;
    std::string kernel;
    bool operator<(const Key& o) const {
      return opt != o.opt ? opt < o.opt : kernel < o.kernel;
    }
  };
  std::map<Key, std::vector<const ProfileRow*>> by_key;
  for (const auto& r : rows) {
    int oi = core_option_index(spec, r.cluster, r.n_cores);
    by_key[{oi, r.kernel}].push_back(&r);
  }

  auto find_time = [](const std::vector<const ProfileRow*>& rs, double fc,
                      double fm) -> double {
    for (const auto* r : rs)
      if (r->f_c == fc && r->f_m == fm) return r->time_s;
    throw std::invalid_argument("fit_models: profile misses a sampling point");
  };

  std::vector<ProfileDataset> stall_data(opts.size()), cpu_data(opts.size()),
      mem_data(opts.size());
  for (auto& [key, rs] : by_key) {
    double t_ref = find_time(rs, sampling.f_c_ref, sampling.f_m_ref);
    double t_prime = find_time(rs, sampling.f_c_prime, sampling.f_m_ref);
    double mb = estimate_mb(t_ref, t_prime, sampling.f_c_ref, sampling.f_c_prime);
    for (const auto* r : rs) {
      double rc = sampling.f_c_ref / r->f_c;
      double rm = sampling.f_m_ref / r->f_m;
      // Eq. 2 target: the stall share left after subtracting the linearly
      // scaled computation component.
      double comp = t_ref * (1.0 - mb) * rc;
      stall_data[key.opt].add({mb, rc, rm}, (r->time_s - comp) / t_ref);
      cpu_data[key.opt].add({mb, r->f_c}, r->cpu_w);
      mem_data[key.opt].add({mb, r->f_c, r->f_m}, r->mem_w);
    }
  }
  for (size_t oi = 0; oi < opts.size(); ++oi) {
    stall_data[oi].provenance = cpu_data[oi].provenance = mem_data[oi].provenance =
        "option " + std::to_string(oi);
    set.options[oi].stall = fit(stall_data[oi]);
    set.options[oi].cpu = fit(cpu_data[oi]);
    set.options[oi].mem = fit(mem_data[oi]);
  }
  return set;
}

KernelTables build_tables(const KernelProfile& profile, const ModelSet& models,
                          const PlatformSpec& spec) {
  auto opts = core_option_list(spec);
  if (profile.time_at_fc.size() != opts.size())
    throw std::invalid_argument("build_tables: profile option count mismatch");
  const auto& sp = models.sampling;
  KernelTables tab;
  tab.kernel = profile.kernel;
  tab.time_s.resize(opts.size());
  tab.cpu_w.resize(opts.size());
  tab.mem_w.resize(opts.size());
  for (size_t oi = 0; oi < opts.size(); ++oi) {
    if (profile.time_at_fc[oi] <= 0.0 || profile.time_at_fc_prime[oi] <= 0.0)
      throw std::invalid_argument("build_tables: missing profile for (cluster " +
                                  std::to_string(opts[oi].cluster) + ", n " +
                                  std::to_string(opts[oi].n_cores) + ")");
    const auto& fc_ladder = spec.clusters[opts[oi].cluster].core_freqs_ghz;
    const auto& fm_ladder = spec.mem_freqs_ghz;
    size_t cells = fc_ladder.size() * fm_ladder.size();
    auto& tg = tab.time_s[oi];
    auto& cg = tab.cpu_w[oi];
    auto& mg = tab.mem_w[oi];
    tg.cells.resize(cells);
    tg.measured.assign(cells, 0);
    cg.cells.resize(cells);
    cg.measured.assign(cells, 0);
    mg.cells.resize(cells);
    mg.measured.assign(cells, 0);
    double t_ref = profile.time_at_fc[oi];
    double mb = profile.mb[oi];
    const auto& om = models.options[oi];
    for (size_t fi = 0; fi < fc_ladder.size(); ++fi) {
      for (size_t mi = 0; mi < fm_ladder.size(); ++mi) {
        size_t idx = fi * fm_ladder.size() + mi;
        double fc = fc_ladder[fi], fm = fm_ladder[mi];
        if (fm == sp.f_m_ref && fc == sp.f_c_ref) {
          tg.cells[idx] = profile.time_at_fc[oi];
          tg.measured[idx] = 1;
        } else if (fm == sp.f_m_ref && fc == sp.f_c_prime) {
          tg.cells[idx] = profile.time_at_fc_prime[oi];
          tg.measured[idx] = 1;
        } else {
          tg.cells[idx] =
              predict_time(t_ref, mb, sp.f_c_ref, fc, sp.f_m_ref, fm, om.stall);
        }
        cg.cells[idx] = std::max(predict_cpu_power(mb, fc, om.cpu), kMinPower);
        mg.cells[idx] = std::max(predict_mem_power(mb, fc, fm, om.mem), kMinPower);
      }
    }
  }
  return tab;
}

std::vector<KernelParams> synthetic_ladder(const GroundTruth& gt, double ref_time_s) {
  const auto& spec = gt.spec();
  const auto& ct = gt.params().clusters.front();
  double fc = spec.max_core_freq();
  double bw1 = ct.bw_gbps.at(1);
  std::vector<KernelParams> out;
  constexpr double kKappa = 0.8, kMu = 0.1;
  for (int i = 0; i <= 40; ++i) {
    double compute_frac = i * 0.025;
    KernelParams k;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "syn%03d", i);
    k.name = buf;
    k.kappa = kKappa;
    k.mu = kMu;
    // At the reference configuration the stall factor collapses to (1 + mu).
    k.ops_g = compute_frac * ref_time_s * ct.ipc * fc;
    k.bytes_gb = (1.0 - compute_frac) * ref_time_s * bw1 / (1.0 + kMu);
    out.push_back(k);
  }
  return out;
}

std::vector<KernelParams> random_kernels(const GroundTruth& gt, int count,
                                         std::uint64_t seed,
                                         const std::string& prefix) {
  const auto& spec = gt.spec();
  const auto& ct = gt.params().clusters.front();
  double fc = spec.max_core_freq();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  std::uniform_real_distribution<double> kappa(0.7, 0.9);
  std::uniform_real_distribution<double> mu(0.05, 0.15);
  std::vector<KernelParams> out;
  for (int i = 0; i < count; ++i) {
    double compute_frac = frac(rng);
    double ref_time = scale(rng);
    KernelParams k;
    k.name = prefix + std::to_string(i);
    k.kappa = kappa(rng);
    k.mu = mu(rng);
    k.ops_g = compute_frac * ref_time * ct.ipc * fc;
    k.bytes_gb = (1.0 - compute_frac) * ref_time * ct.bw_gbps.at(1) / (1.0 + k.mu);
    out.push_back(k);
  }
  return out;
}

IdleShares attribute_idle(const std::vector<double>& cluster_idle_w,
                          double mem_idle_w,
                          const std::vector<RunningTaskUsage>& running) {
  IdleShares out;
  for (const auto& r : running) out.per_task_w[r.task] = 0.0;
  for (size_t c = 0; c < cluster_idle_w.size(); ++c) {
    int cores_in_use = 0;
    for (const auto& r : running)
      if (r.cluster == static_cast<int>(c)) cores_in_use += r.cores;
    if (cores_in_use == 0) {
      out.unattributed_w += cluster_idle_w[c];
      continue;
    }
    for (const auto& r : running)
      if (r.cluster == static_cast<int>(c))
        out.per_task_w[r.task] +=
            cluster_idle_w[c] * static_cast<double>(r.cores) / cores_in_use;
  }
  if (running.empty()) {
    out.unattributed_w += mem_idle_w;
  } else {
    for (const auto& r : running)
      out.per_task_w[r.task] += mem_idle_w / static_cast<double>(running.size());
  }
  return out;
}

}  // namespace joss
