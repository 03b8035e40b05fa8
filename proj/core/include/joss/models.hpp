#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "joss/mpr.hpp"
#include "joss/platform.hpp"

namespace joss {

/// Flattened list of (cluster, n_cores) options a task can run with.
struct CoreOption {
  int cluster;
  int n_cores;
};
std::vector<CoreOption> core_option_list(const PlatformSpec& spec);
int core_option_index(const PlatformSpec& spec, int cluster, int n_cores);

/// Eq. 3: MB = (Time'/Time - fC/fC') / (1 - fC/fC'), clamped to [0,1].
double estimate_mb(double time_at_fc, double time_at_fc_prime, double f_c,
                   double f_c_prime);

/// Eq. 1 + Eq. 2: comp scales linearly with f_c, stall via the fitted MPR
/// over [MB, f_c/f_c', f_m/f_m']. Floored at 1 microsecond.
double predict_time(double profile_time, double mb, double f_c, double f_c_prime,
                    double f_m, double f_m_prime, const MprModel& stall_model);

/// Eq. 4: 2-variable MPR over [MB, f_c]; memory frequency is not a regressor.
double predict_cpu_power(double mb, double f_c, const MprModel& model);

/// Eq. 5: 3-variable MPR over [MB, f_c, f_m].
double predict_mem_power(double mb, double f_c, double f_m, const MprModel& model);

/// accuracy = 1 - |real - prediction| / real; may be negative. real must be > 0.
double accuracy(double real, double predicted);

/// Sampling protocol constants: times are sampled at f_c_ref and f_c_prime
/// with the memory frequency held at f_m_ref.
struct SamplingPoints {
  double f_c_ref;    // widest-gap high frequency (ladder max by default)
  double f_c_prime;  // low sampling frequency
  double f_m_ref;    // memory frequency held during sampling (ladder max)
};
SamplingPoints default_sampling_points(const PlatformSpec& spec);

/// Per-kernel sampled times and derived MB, one slot per core option.
struct KernelProfile {
  std::string kernel;
  // parallel to core_option_list(spec)
  std::vector<double> time_at_fc;        // <= 0 means missing
  std::vector<double> time_at_fc_prime;  // <= 0 means missing
  std::vector<double> mb;
  bool mb_defaulted = false;  // true when a slot fell back to MB = 0.5

  explicit KernelProfile(std::string k = {}, size_t n_options = 0)
      : kernel(std::move(k)),
        time_at_fc(n_options, 0.0),
        time_at_fc_prime(n_options, 0.0),
        mb(n_options, 0.0) {}
};

/// One (f_C x f_M) grid of a lookup table.
struct FreqGrid {
  std::vector<double> cells;           // fc_idx * n_fm + fm_idx
  std::vector<std::uint8_t> measured;  // nonzero where the cell is a sample
};

/// The three per-kernel tables of predicted time / CPU power / memory power.
struct KernelTables {
  std::string kernel;
  std::vector<FreqGrid> time_s;  // one grid per core option
  std::vector<FreqGrid> cpu_w;
  std::vector<FreqGrid> mem_w;

  size_t entry_count() const;
  int measured_count() const;
};

struct IdlePowerTable {
  // cluster -> watts per f_C ladder index
  std::vector<std::vector<double>> cpu_idle_w;
  // watts per f_M ladder index
  std::vector<double> mem_idle_w;
};

/// Idle table filled from the ground truth, standing in for the idle-power
/// measurements taken during benchmarking.
IdlePowerTable measure_idle(const GroundTruth& gt);

/// Fitted models for one core option.
struct OptionModels {
  MprModel stall;  // 3 vars: [MB, f_c/f_c', f_m/f_m']
  MprModel cpu;    // 2 vars: [MB, f_c]
  MprModel mem;    // 3 vars: [MB, f_c, f_m]
};

struct ModelSet {
  SamplingPoints sampling;
  std::vector<OptionModels> options;  // parallel to core_option_list
};

/// One profiled measurement, the unit of the profile CSV.
struct ProfileRow {
  std::string kernel;
  int cluster;
  int n_cores;
  double f_c;
  double f_m;
  double time_s;
  double cpu_w;
  double mem_w;
};

/// Exercise every synthetic kernel at every configuration on the oracle.
std::vector<ProfileRow> profile_grid(const GroundTruth& gt,
                                     const std::vector<KernelParams>& kernels);

/// Fit the stall/CPU-power/memory-power models per core option from a
/// profile (Fig. 4 pipeline). MB values are derived with the same Eq. 3
/// estimator the runtime uses.
ModelSet fit_models(const PlatformSpec& spec, const std::vector<ProfileRow>& rows,
                    const SamplingPoints& sampling);

/// Populate the three lookup tables for one kernel from its profile.
/// Sampled cells carry the measured flag and the exact sampled values.
KernelTables build_tables(const KernelProfile& profile, const ModelSet& models,
                          const PlatformSpec& spec);

/// The 41-kernel synthetic ladder: compute:memory reference-time ratios from
/// 0%:100% to 100%:0% in 2.5% steps, equal total time at the reference
/// configuration (cluster 0, 1 core, max frequencies).
std::vector<KernelParams> synthetic_ladder(const GroundTruth& gt,
                                           double ref_time_s = 1.0);

/// Random kernels for held-out validation; deterministic per seed.
std::vector<KernelParams> random_kernels(const GroundTruth& gt, int count,
                                         std::uint64_t seed,
                                         const std::string& prefix = "rnd");

struct RunningTaskUsage {
  int task;
  int cluster;
  int cores;
};

struct IdleShares {
  std::map<int, double> per_task_w;
  double unattributed_w = 0.0;
};

/// CPU idle per cluster split proportionally to cores used within that
/// cluster; memory idle split equally among all running tasks. Shares sum to
/// the input wattage exactly; idle of empty domains goes to unattributed.
IdleShares attribute_idle(const std::vector<double>& cluster_idle_w,
                          double mem_idle_w,
                          const std::vector<RunningTaskUsage>& running);

}  // namespace joss
