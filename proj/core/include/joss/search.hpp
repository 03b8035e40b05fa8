#pragma once

#include <functional>
#include <optional>
#include <string>

#include "joss/models.hpp"
#include "joss/platform.hpp"

namespace joss {

struct EnergyEstimate {
  Configuration config;
  double time_s = 0.0;
  double energy_j = 0.0;  // (cpu_w + mem_w + idle_share_w) * time
};

struct SearchStats {
  int cells_evaluated = 0;
  int steps = 0;
};

/// Optional per-step trace sink: "step cluster n f_c f_m energy".
using SearchTrace = std::function<void(const std::string& line)>;

/// Read-only view binding one kernel's tables to the platform and the idle
/// table; all searches run over this.
class SearchContext {
 public:
  SearchContext(const PlatformSpec& spec, const KernelTables& tables,
                const IdlePowerTable& idle, int concurrency_hint = 1);

  const PlatformSpec& spec() const { return *spec_; }
  int concurrency_hint() const { return hint_; }

  /// E = time * [cpu_w + mem_w + idle_share]; idle share is the task's own
  /// cluster idle plus memory idle, both divided by the concurrency hint.
  EnergyEstimate energy_of(int opt, int fc_idx, int fm_idx) const;
  EnergyEstimate energy_of(const Configuration& cfg) const;
  double time_of(int opt, int fc_idx, int fm_idx) const;
  /// CPU-only energy slice used by the erase-like / steer-like baselines.
  double cpu_energy_of(int opt, int fc_idx, int fm_idx) const;

  int option_count() const { return static_cast<int>(options_.size()); }
  const CoreOption& option(int i) const { return options_[i]; }
  int n_fc(int opt) const;
  int n_fm() const;
  /// Restrict every search to a single f_M index (no-memory-DVFS mode).
  void lock_fm(int fm_idx);
  int fm_begin() const { return fm_lock_ < 0 ? 0 : fm_lock_; }
  int fm_end() const { return fm_lock_ < 0 ? n_fm() : fm_lock_ + 1; }
  Configuration make_config(int opt, int fc_idx, int fm_idx) const;
  int grid_size() const;  // total cells across all options

 private:
  const PlatformSpec* spec_;
  const KernelTables* tables_;
  const IdlePowerTable* idle_;
  std::vector<CoreOption> options_;
  int hint_;
  int fm_lock_ = -1;
};

/// Global argmin of energy over the whole grid. Ties break toward higher
/// f_c, then fewer cores, then lower cluster index.
std::pair<Configuration, SearchStats> exhaustive_min_energy(
    const SearchContext& ctx, const SearchTrace& trace = nullptr);

/// Corner-seeded steepest descent (the Fig. 5 pruning):
///  1. evaluate the four (f_C, f_M) corners of every core-option table;
///  2. pick the table winning the most corner positions;
///  3. walk 8-connected neighbors downhill from that table's best corner.
std::pair<Configuration, SearchStats> steepest_descent_min_energy(
    const SearchContext& ctx, const SearchTrace& trace = nullptr);

enum class SearchMode { Exhaustive, Descent };

/// Feasible set = cells at least speedup_target faster than the min-energy
/// baseline; returns its min-energy cell, or the global fastest cell when
/// the set is empty.
std::pair<Configuration, SearchStats> constrained_min_energy(
    const SearchContext& ctx, double speedup_target,
    SearchMode mode = SearchMode::Exhaustive);

/// Global min-time cell; ties break toward lower energy.
std::pair<Configuration, SearchStats> max_perf_config(const SearchContext& ctx);

}  // namespace joss
