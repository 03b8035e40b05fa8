#include "joss/platform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace joss {

namespace {

void check_ascending(const std::vector<double>& v, const std::string& what) {
  if (v.empty()) throw std::invalid_argument(what + ": empty frequency list");
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0.0) throw std::invalid_argument(what + ": nonpositive frequency");
    if (i > 0 && v[i] <= v[i - 1])
      throw std::invalid_argument(what + ": frequencies not strictly ascending");
  }
}

}  // namespace

std::vector<int> ClusterSpec::allowed_core_counts() const {
  std::vector<int> out;
  for (int n = 1; n <= core_count; n *= 2) out.push_back(n);
  return out;
}

void PlatformSpec::validate() const {
  if (clusters.empty()) throw std::invalid_argument("platform: no clusters");
  check_ascending(mem_freqs_ghz, "mem_freqs_ghz");
  for (const auto& c : clusters) {
    if (c.core_count < 1)
      throw std::invalid_argument("cluster " + c.name + ": core_count < 1");
    check_ascending(c.core_freqs_ghz, "cluster " + c.name);
    if (c.core_freqs_ghz != clusters.front().core_freqs_ghz)
      throw std::invalid_argument(
          "cluster " + c.name + ": all clusters must share one core-frequency ladder");
  }
  if (cpu_dvfs_latency_s < 0 || mem_dvfs_latency_s < 0 || power_sample_period_s <= 0)
    throw std::invalid_argument("platform: negative latency or period");
}

int PlatformSpec::total_cores() const {
  int n = 0;
  for (const auto& c : clusters) n += c.core_count;
  return n;
}

int PlatformSpec::core_options() const {
  int n = 0;
  for (const auto& c : clusters) n += static_cast<int>(c.allowed_core_counts().size());
  return n;
}

std::string Configuration::to_string() const {
  std::ostringstream os;
  os << "<" << cluster << ", " << n_cores << ", " << f_c << ", " << f_m << ">";
  return os.str();
}

void validate_configuration(const PlatformSpec& spec, const Configuration& cfg) {
  if (cfg.cluster < 0 || cfg.cluster >= static_cast<int>(spec.clusters.size()))
    throw std::invalid_argument("configuration: unknown cluster " + std::to_string(cfg.cluster));
  const auto& cl = spec.clusters[cfg.cluster];
  auto counts = cl.allowed_core_counts();
  if (std::find(counts.begin(), counts.end(), cfg.n_cores) == counts.end())
    throw std::invalid_argument("configuration: n_cores " + std::to_string(cfg.n_cores) +
                                " not allowed on cluster " + cl.name);
  auto in_ladder = [](const std::vector<double>& ladder, double f) {
    return std::find(ladder.begin(), ladder.end(), f) != ladder.end();
  };
  if (!in_ladder(cl.core_freqs_ghz, cfg.f_c))
    throw std::invalid_argument("configuration: f_c " + std::to_string(cfg.f_c) +
                                " not in core ladder");
  if (!in_ladder(spec.mem_freqs_ghz, cfg.f_m))
    throw std::invalid_argument("configuration: f_m " + std::to_string(cfg.f_m) +
                                " not in memory ladder");
}

void GroundTruthParams::validate(const PlatformSpec& spec) const {
  if (clusters.size() != spec.clusters.size())
    throw std::invalid_argument("ground truth: cluster count mismatch");
  for (size_t i = 0; i < clusters.size(); ++i) {
    const auto& ct = clusters[i];
    if (ct.ipc <= 0) throw std::invalid_argument("ground truth: ipc must be > 0");
    if (ct.alpha < 0 || ct.beta < 0 || ct.iota < 0)
      throw std::invalid_argument("ground truth: negative power coefficient");
    double prev_eff = 1.0, prev_bw = 0.0;
    for (int n : spec.clusters[i].allowed_core_counts()) {
      auto e = ct.eff.find(n);
      auto b = ct.bw_gbps.find(n);
      if (e == ct.eff.end() || b == ct.bw_gbps.end())
        throw std::invalid_argument("ground truth: missing eff/bw entry for n=" +
                                    std::to_string(n));
      if (n == 1 && e->second != 1.0)
        throw std::invalid_argument("ground truth: eff(1) must be 1");
      if (e->second > prev_eff + 1e-12)
        throw std::invalid_argument("ground truth: eff must be non-increasing");
      if (b->second < prev_bw)
        throw std::invalid_argument("ground truth: bw must be non-decreasing");
      prev_eff = e->second;
      prev_bw = b->second;
    }
  }
  if (delta0 < 0 || delta1 < 0 || rho0 < 0 || rho1 < 0)
    throw std::invalid_argument("ground truth: negative memory coefficient");
  for (const auto& [name, k] : kernels) {
    if (k.ops_g < 0 || k.bytes_gb < 0 || k.mu < 0)
      throw std::invalid_argument("kernel " + name + ": negative parameter");
    if (k.kappa < 0 || k.kappa > 1)
      throw std::invalid_argument("kernel " + name + ": kappa outside [0,1]");
  }
}

GroundTruth::GroundTruth(PlatformSpec spec, GroundTruthParams params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  params_.validate(spec_);
}

const KernelParams& GroundTruth::kernel(const std::string& name) const {
  auto it = params_.kernels.find(name);
  if (it == params_.kernels.end())
    throw std::invalid_argument("unknown kernel: " + name);
  return it->second;
}

double GroundTruth::comp_time(const KernelParams& k, const Configuration& cfg) const {
  validate_configuration(spec_, cfg);
  if (k.ops_g == 0.0) return 0.0;
  const auto& ct = params_.clusters[cfg.cluster];
  return k.ops_g / (ct.ipc * cfg.n_cores * ct.eff.at(cfg.n_cores) * cfg.f_c);
}

double GroundTruth::stall_time(const KernelParams& k, const Configuration& cfg) const {
  validate_configuration(spec_, cfg);
  if (k.bytes_gb == 0.0) return 0.0;
  const auto& ct = params_.clusters[cfg.cluster];
  double s0 = k.bytes_gb / ct.bw_gbps.at(cfg.n_cores);
  double rc = spec_.max_core_freq() / cfg.f_c;
  double rm = spec_.max_mem_freq() / cfg.f_m;
  return s0 * (k.kappa * rm + (1.0 - k.kappa) * rc + k.mu * rc * rm);
}

double GroundTruth::time(const KernelParams& k, const Configuration& cfg) const {
  return (comp_time(k, cfg) + stall_time(k, cfg)) * noise_factor(k, cfg);
}

double GroundTruth::mb_true(const KernelParams& k, const Configuration& cfg) const {
  double c = comp_time(k, cfg), s = stall_time(k, cfg);
  if (c + s == 0.0) return 0.0;
  return s / (c + s);
}

double GroundTruth::cpu_power(const KernelParams&, const Configuration& cfg, double mb) const {
  if (mb < 0.0 || mb > 1.0) throw std::invalid_argument("cpu_power: mb outside [0,1]");
  validate_configuration(spec_, cfg);
  const auto& ct = params_.clusters[cfg.cluster];
  double v = ct.v0 + ct.v1 * cfg.f_c;
  return cfg.n_cores * ct.alpha * cfg.f_c * v * v * (1.0 - ct.beta * mb);
}

double GroundTruth::mem_power(const KernelParams&, const Configuration& cfg,
                              double traffic_gbps) const {
  if (traffic_gbps < 0.0) throw std::invalid_argument("mem_power: negative traffic");
  validate_configuration(spec_, cfg);
  return params_.delta0 * cfg.f_m + params_.delta1 * traffic_gbps;
}

double GroundTruth::cpu_power_at(const KernelParams& k, const Configuration& cfg) const {
  return cpu_power(k, cfg, mb_true(k, cfg));
}

double GroundTruth::mem_power_at(const KernelParams& k, const Configuration& cfg) const {
  double t = time(k, cfg);
  double traffic = (t > 0.0) ? k.bytes_gb / t : 0.0;
  return mem_power(k, cfg, traffic);
}

double GroundTruth::idle_cpu_power(int cluster, double f_c) const {
  const auto& ct = params_.clusters.at(cluster);
  double v = ct.v0 + ct.v1 * f_c;
  return spec_.clusters[cluster].core_count * ct.iota * f_c * v * v;
}

double GroundTruth::idle_mem_power(double f_m) const {
  return params_.rho0 + params_.rho1 * f_m;
}

double GroundTruth::noise_factor(const KernelParams& k, const Configuration& cfg) const {
  if (!params_.noise_enabled || params_.noise_sigma <= 0.0) return 1.0;
  // Stable per (kernel, cfg): the same pair always redraws the same factor.
  std::uint64_t h = params_.noise_seed;
  auto mix = [&h](std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(std::hash<std::string>{}(k.name));
  mix(static_cast<std::uint64_t>(cfg.cluster));
  mix(static_cast<std::uint64_t>(cfg.n_cores));
  mix(std::hash<double>{}(cfg.f_c));
  mix(std::hash<double>{}(cfg.f_m));
  std::mt19937_64 rng(h);
  std::normal_distribution<double> dist(0.0, params_.noise_sigma);
  return std::max(0.01, 1.0 + dist(rng));
}

PlatformSpec default_tx2_spec() {
  PlatformSpec spec;
  std::vector<double> core_ladder = {0.65, 0.81, 0.96, 1.11, 1.27,
                                     1.42, 1.57, 1.73, 1.88, 2.04};
  spec.clusters.push_back({"denver", 2, core_ladder, "big"});
  spec.clusters.push_back({"a57", 4, core_ladder, "little"});
  spec.mem_freqs_ghz = {0.80, 1.07, 1.33, 1.60, 1.87};
  spec.cpu_dvfs_latency_s = 50e-6;
  spec.mem_dvfs_latency_s = 100e-6;
  spec.power_sample_period_s = 5e-3;
  return spec;
}

GroundTruthParams default_tx2_truth() {
  GroundTruthParams p;
  ClusterTruth denver;
  denver.ipc = 3.4;
  denver.eff = {{1, 1.0}, {2, 0.93}};
  denver.bw_gbps = {{1, 14.0}, {2, 19.0}};
  denver.alpha = 0.55;
  denver.beta = 0.25;
  denver.v0 = 0.45;
  denver.v1 = 0.55;
  denver.iota = 0.06;
  ClusterTruth a57;
  a57.ipc = 1.0;
  a57.eff = {{1, 1.0}, {2, 0.95}, {4, 0.86}};
  a57.bw_gbps = {{1, 10.0}, {2, 14.0}, {4, 17.0}};
  a57.alpha = 0.30;
  a57.beta = 0.22;
  a57.v0 = 0.50;
  a57.v1 = 0.50;
  a57.iota = 0.05;
  p.clusters = {denver, a57};
  p.delta0 = 0.55;
  p.delta1 = 0.10;
  p.rho0 = 0.25;
  p.rho1 = 0.30;
  return p;
}

}  // namespace joss
