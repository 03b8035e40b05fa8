#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace joss {

/// One core cluster: a set of identical cores sharing a frequency domain.
struct ClusterSpec {
  std::string name;
  int core_count = 1;
  std::vector<double> core_freqs_ghz;  // strictly ascending
  std::string perf_class;              // opaque tag consumed by the ground truth

  /// Per-task core counts are restricted to powers of two up to core_count.
  std::vector<int> allowed_core_counts() const;
};

/// The simulated machine: clusters plus a shared memory frequency domain.
struct PlatformSpec {
  std::vector<ClusterSpec> clusters;
  std::vector<double> mem_freqs_ghz;  // strictly ascending
  double cpu_dvfs_latency_s = 50e-6;
  double mem_dvfs_latency_s = 100e-6;
  double power_sample_period_s = 5e-3;

  void validate() const;  // throws std::invalid_argument on violation

  int total_cores() const;
  double max_core_freq() const { return clusters.front().core_freqs_ghz.back(); }
  double max_mem_freq() const { return mem_freqs_ghz.back(); }
  /// Sum over clusters of (log2(core_count)+1), i.e. the number of
  /// (cluster, n_cores) options a task can be scheduled with.
  int core_options() const;
};

/// The unit of all search and scheduling decisions.
struct Configuration {
  int cluster = 0;
  int n_cores = 1;
  double f_c = 0.0;  // GHz
  double f_m = 0.0;  // GHz

  bool operator==(const Configuration&) const = default;
  std::string to_string() const;
};

/// Throws std::invalid_argument if cfg is not realizable on spec.
void validate_configuration(const PlatformSpec& spec, const Configuration& cfg);

/// Hidden analytic oracle parameters for one kernel.
struct KernelParams {
  std::string name;
  double ops_g = 0.0;    // total compute work, G-ops
  double bytes_gb = 0.0; // total memory traffic, GB
  double kappa = 0.5;    // latency/bandwidth mix of the stall term, in [0,1]
  double mu = 0.0;       // f_c x f_m interaction weight, >= 0
};

struct ClusterTruth {
  double ipc = 1.0;                       // ops/cycle/core
  std::map<int, double> eff;              // n_cores -> parallel efficiency, eff[1]=1
  std::map<int, double> bw_gbps;          // n_cores -> attainable bandwidth
  // CPU power: P = n * alpha * f_c * (v0 + v1*f_c)^2 * (1 - beta*MB)
  double alpha = 1.0;
  double beta = 0.0;
  double v0 = 0.0;
  double v1 = 1.0;
  double iota = 0.0;  // idle coefficient per core
};

/// The parametric stand-in for real hardware: produces "measured" task
/// execution times and power draws that the framework has to learn.
struct GroundTruthParams {
  std::vector<ClusterTruth> clusters;  // parallel to PlatformSpec::clusters
  double delta0 = 0.0;  // memory dynamic: P = delta0*f_m + delta1*traffic
  double delta1 = 0.0;
  double rho0 = 0.0;    // memory idle: P = rho0 + rho1*f_m
  double rho1 = 0.0;
  std::map<std::string, KernelParams> kernels;
  bool noise_enabled = false;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;

  void validate(const PlatformSpec& spec) const;
};

class GroundTruth {
 public:
  GroundTruth(PlatformSpec spec, GroundTruthParams params);

  const PlatformSpec& spec() const { return spec_; }
  const GroundTruthParams& params() const { return params_; }

  const KernelParams& kernel(const std::string& name) const;

  /// Computation seconds: ops / (ipc * n * eff(n) * f_c).
  double comp_time(const KernelParams& k, const Configuration& cfg) const;
  /// Stall seconds: S0 * [k*(fm_max/f_m) + (1-k)*(fc_max/f_c) + mu*(fc_max/f_c)*(fm_max/f_m)].
  double stall_time(const KernelParams& k, const Configuration& cfg) const;
  double time(const KernelParams& k, const Configuration& cfg) const;
  /// Stall fraction stall/(comp+stall) at cfg; 0 for an empty kernel.
  double mb_true(const KernelParams& k, const Configuration& cfg) const;

  double cpu_power(const KernelParams& k, const Configuration& cfg, double mb) const;
  double mem_power(const KernelParams& k, const Configuration& cfg, double traffic_gbps) const;
  /// Convenience: dynamic powers with mb/traffic derived at cfg.
  double cpu_power_at(const KernelParams& k, const Configuration& cfg) const;
  double mem_power_at(const KernelParams& k, const Configuration& cfg) const;

  double idle_cpu_power(int cluster, double f_c) const;  // whole-cluster watts
  double idle_mem_power(double f_m) const;

  /// Multiplicative noise factor for a (kernel, cfg) pair; 1.0 when disabled.
  double noise_factor(const KernelParams& k, const Configuration& cfg) const;

 private:
  PlatformSpec spec_;
  GroundTruthParams params_;
};

/// The default simulated platform mirroring a Jetson TX2: a 2-core "denver"
/// cluster and a 4-core "a57" cluster, 10 shared core frequencies from 0.65
/// to 2.04 GHz and 5 memory frequencies from 0.80 to 1.87 GHz.
PlatformSpec default_tx2_spec();

/// Ground truth defaults tuned so that denver is ~3.4x faster per core than
/// a57 and memory energy is a significant fraction of the total.
GroundTruthParams default_tx2_truth();

}  // namespace joss
