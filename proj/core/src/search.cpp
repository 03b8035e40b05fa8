#include "joss/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace joss {

namespace {

struct Cell {
  int opt, fc, fm;
  bool operator<(const Cell& o) const {
    if (opt != o.opt) return opt < o.opt;
    if (fc != o.fc) return fc < o.fc;
    return fm < o.fm;
  }
};

// Tie rule shared by all searches: lower energy, then higher f_c, then fewer
// cores, then lower cluster index.
bool energy_better(const SearchContext& ctx, double e_new, const Cell& c_new,
                   double e_old, const Cell& c_old) {
  if (e_new != e_old) return e_new < e_old;
  auto cfg_new = ctx.make_config(c_new.opt, c_new.fc, c_new.fm);
  auto cfg_old = ctx.make_config(c_old.opt, c_old.fc, c_old.fm);
  if (cfg_new.f_c != cfg_old.f_c) return cfg_new.f_c > cfg_old.f_c;
  if (cfg_new.n_cores != cfg_old.n_cores) return cfg_new.n_cores < cfg_old.n_cores;
  return cfg_new.cluster < cfg_old.cluster;
}

// Unique-cell evaluation memo so the descent never counts a cell twice.
class Evaluator {
 public:
  explicit Evaluator(const SearchContext& ctx) : ctx_(ctx) {}
  double energy(const Cell& c) {
    auto it = memo_.find(c);
    if (it != memo_.end()) return it->second;
    double e = ctx_.energy_of(c.opt, c.fc, c.fm).energy_j;
    memo_.emplace(c, e);
    return e;
  }
  int evaluated() const { return static_cast<int>(memo_.size()); }

 private:
  const SearchContext& ctx_;
  std::map<Cell, double> memo_;
};

void emit_trace(const SearchTrace& trace, const SearchContext& ctx, int step,
                const Cell& c, double energy) {
  if (!trace) return;
  auto cfg = ctx.make_config(c.opt, c.fc, c.fm);
  std::ostringstream os;
  os << step << ' ' << cfg.cluster << ' ' << cfg.n_cores << ' ' << cfg.f_c << ' '
     << cfg.f_m << ' ' << energy;
  trace(os.str());
}

}  // namespace

SearchContext::SearchContext(const PlatformSpec& spec, const KernelTables& tables,
                             const IdlePowerTable& idle, int concurrency_hint)
    : spec_(&spec),
      tables_(&tables),
      idle_(&idle),
      options_(core_option_list(spec)),
      hint_(std::max(1, concurrency_hint)) {
  if (tables.time_s.size() != options_.size())
    throw std::invalid_argument("search: tables do not match the platform");
}

int SearchContext::n_fc(int opt) const {
  return static_cast<int>(spec_->clusters[options_[opt].cluster].core_freqs_ghz.size());
}

int SearchContext::n_fm() const {
  return static_cast<int>(spec_->mem_freqs_ghz.size());
}

Configuration SearchContext::make_config(int opt, int fc_idx, int fm_idx) const {
  const auto& o = options_[opt];
  return {o.cluster, o.n_cores, spec_->clusters[o.cluster].core_freqs_ghz[fc_idx],
          spec_->mem_freqs_ghz[fm_idx]};
}

void SearchContext::lock_fm(int fm_idx) {
  if (fm_idx < 0 || fm_idx >= n_fm())
    throw std::invalid_argument("lock_fm: index outside the memory ladder");
  fm_lock_ = fm_idx;
}

int SearchContext::grid_size() const {
  int n = 0;
  for (int o = 0; o < option_count(); ++o) n += n_fc(o) * (fm_end() - fm_begin());
  return n;
}

double SearchContext::time_of(int opt, int fc_idx, int fm_idx) const {
  return tables_->time_s[opt].cells[fc_idx * n_fm() + fm_idx];
}

EnergyEstimate SearchContext::energy_of(int opt, int fc_idx, int fm_idx) const {
  size_t idx = static_cast<size_t>(fc_idx) * n_fm() + fm_idx;
  if (opt < 0 || opt >= option_count() || idx >= tables_->time_s[opt].cells.size())
    throw std::out_of_range("search: missing table cell");
  double t = tables_->time_s[opt].cells[idx];
  double cpu = tables_->cpu_w[opt].cells[idx];
  double mem = tables_->mem_w[opt].cells[idx];
  // Charge a share of the whole chip's idle draw: the own cluster at this
  // cell's frequency, every other cluster at its top frequency. Slow cells
  // thereby pay for the idle energy the rest of the machine burns while the
  // task drags on.
  double idle_w = idle_->mem_idle_w[fm_idx];
  for (size_t c = 0; c < idle_->cpu_idle_w.size(); ++c)
    idle_w += c == static_cast<size_t>(options_[opt].cluster)
                  ? idle_->cpu_idle_w[c][fc_idx]
                  : idle_->cpu_idle_w[c].back();
  double idle = idle_w / hint_;
  EnergyEstimate e;
  e.config = make_config(opt, fc_idx, fm_idx);
  e.time_s = t;
  e.energy_j = t * (cpu + mem + idle);
  return e;
}

EnergyEstimate SearchContext::energy_of(const Configuration& cfg) const {
  validate_configuration(*spec_, cfg);
  int opt = core_option_index(*spec_, cfg.cluster, cfg.n_cores);
  const auto& fcs = spec_->clusters[cfg.cluster].core_freqs_ghz;
  int fc_idx = static_cast<int>(std::find(fcs.begin(), fcs.end(), cfg.f_c) - fcs.begin());
  const auto& fms = spec_->mem_freqs_ghz;
  int fm_idx = static_cast<int>(std::find(fms.begin(), fms.end(), cfg.f_m) - fms.begin());
  return energy_of(opt, fc_idx, fm_idx);
}

double SearchContext::cpu_energy_of(int opt, int fc_idx, int fm_idx) const {
  size_t idx = static_cast<size_t>(fc_idx) * n_fm() + fm_idx;
  double t = tables_->time_s[opt].cells[idx];
  double cpu = tables_->cpu_w[opt].cells[idx];
  double idle = idle_->cpu_idle_w[options_[opt].cluster][fc_idx] / hint_;
  return t * (cpu + idle);
}

std::pair<Configuration, SearchStats> exhaustive_min_energy(const SearchContext& ctx,
                                                            const SearchTrace& trace) {
  SearchStats stats;
  Cell best{-1, -1, -1};
  double best_e = std::numeric_limits<double>::infinity();
  for (int o = 0; o < ctx.option_count(); ++o) {
    for (int fc = 0; fc < ctx.n_fc(o); ++fc) {
      for (int fm = ctx.fm_begin(); fm < ctx.fm_end(); ++fm) {
        Cell c{o, fc, fm};
        double e = ctx.energy_of(o, fc, fm).energy_j;
        ++stats.cells_evaluated;
        if (best.opt < 0 || energy_better(ctx, e, c, best_e, best)) {
          best = c;
          best_e = e;
        }
      }
    }
  }
  emit_trace(trace, ctx, 0, best, best_e);
  return {ctx.make_config(best.opt, best.fc, best.fm), stats};
}

std::pair<Configuration, SearchStats> steepest_descent_min_energy(
    const SearchContext& ctx, const SearchTrace& trace) {
  Evaluator eval(ctx);
  SearchStats stats;

  // Step 1: the four (f_C, f_M) corners of every core-option table.
  std::vector<std::array<Cell, 4>> corners(ctx.option_count());
  const int fm_lo = ctx.fm_begin(), fm_hi = ctx.fm_end() - 1;
  for (int o = 0; o < ctx.option_count(); ++o) {
    int fc_hi = ctx.n_fc(o) - 1;
    corners[o] = {Cell{o, 0, fm_lo}, Cell{o, 0, fm_hi}, Cell{o, fc_hi, fm_lo},
                  Cell{o, fc_hi, fm_hi}};
  }

  // Step 2: the option winning the most corner positions; ties go to the
  // lower total corner energy, then the lower option index.
  std::vector<int> wins(ctx.option_count(), 0);
  std::vector<double> corner_sum(ctx.option_count(), 0.0);
  for (int pos = 0; pos < 4; ++pos) {
    int winner = 0;
    double winner_e = eval.energy(corners[0][pos]);
    for (int o = 1; o < ctx.option_count(); ++o) {
      double e = eval.energy(corners[o][pos]);
      if (e < winner_e) {
        winner = o;
        winner_e = e;
      }
    }
    ++wins[winner];
  }
  for (int o = 0; o < ctx.option_count(); ++o)
    for (int pos = 0; pos < 4; ++pos) corner_sum[o] += eval.energy(corners[o][pos]);
  int table = 0;
  for (int o = 1; o < ctx.option_count(); ++o) {
    if (wins[o] > wins[table] ||
        (wins[o] == wins[table] && corner_sum[o] < corner_sum[table]))
      table = o;
  }

  // Step 3: walk downhill from the table's lowest-energy corner.
  Cell cur = corners[table][0];
  double cur_e = eval.energy(cur);
  for (int pos = 1; pos < 4; ++pos) {
    double e = eval.energy(corners[table][pos]);
    if (e < cur_e) {
      cur = corners[table][pos];
      cur_e = e;
    }
  }
  emit_trace(trace, ctx, stats.steps, cur, cur_e);
  const int n_fc = ctx.n_fc(table);
  for (;;) {
    Cell best_n = cur;
    double best_e = cur_e;
    for (int dfc = -1; dfc <= 1; ++dfc) {
      for (int dfm = -1; dfm <= 1; ++dfm) {
        if (dfc == 0 && dfm == 0) continue;
        int fc = cur.fc + dfc, fm = cur.fm + dfm;
        if (fc < 0 || fc >= n_fc || fm < fm_lo || fm > fm_hi) continue;
        Cell c{table, fc, fm};
        double e = eval.energy(c);
        if (e < best_e) {
          best_n = c;
          best_e = e;
        }
      }
    }
    if (best_e >= cur_e) break;  // current cell <= all neighbours
    cur = best_n;
    cur_e = best_e;
    ++stats.steps;
    emit_trace(trace, ctx, stats.steps, cur, cur_e);
  }
  stats.cells_evaluated = eval.evaluated();
  return {ctx.make_config(cur.opt, cur.fc, cur.fm), stats};
}

std::pair<Configuration, SearchStats> constrained_min_energy(const SearchContext& ctx,
                                                             double speedup_target,
                                                             SearchMode mode) {
  if (speedup_target < 1.0)
    throw std::invalid_argument("constrained search: speedup target must be >= 1");
  auto [baseline, stats] = (mode == SearchMode::Exhaustive)
                               ? exhaustive_min_energy(ctx)
                               : steepest_descent_min_energy(ctx);
  double budget = ctx.energy_of(baseline).time_s / speedup_target;

  Cell best{-1, -1, -1}, fastest{-1, -1, -1};
  double best_e = 0.0, fastest_t = std::numeric_limits<double>::infinity();
  double fastest_e = std::numeric_limits<double>::infinity();
  for (int o = 0; o < ctx.option_count(); ++o) {
    for (int fc = 0; fc < ctx.n_fc(o); ++fc) {
      for (int fm = ctx.fm_begin(); fm < ctx.fm_end(); ++fm) {
        Cell c{o, fc, fm};
        auto est = ctx.energy_of(o, fc, fm);
        ++stats.cells_evaluated;
        if (est.time_s < fastest_t ||
            (est.time_s == fastest_t && est.energy_j < fastest_e)) {
          fastest = c;
          fastest_t = est.time_s;
          fastest_e = est.energy_j;
        }
        if (est.time_s <= budget &&
            (best.opt < 0 || energy_better(ctx, est.energy_j, c, best_e, best))) {
          best = c;
          best_e = est.energy_j;
        }
      }
    }
  }
  Cell pick = (best.opt >= 0) ? best : fastest;
  return {ctx.make_config(pick.opt, pick.fc, pick.fm), stats};
}

std::pair<Configuration, SearchStats> max_perf_config(const SearchContext& ctx) {
  SearchStats stats;
  Cell best{-1, -1, -1};
  double best_t = std::numeric_limits<double>::infinity();
  double best_e = std::numeric_limits<double>::infinity();
  for (int o = 0; o < ctx.option_count(); ++o) {
    for (int fc = 0; fc < ctx.n_fc(o); ++fc) {
      for (int fm = ctx.fm_begin(); fm < ctx.fm_end(); ++fm) {
        auto est = ctx.energy_of(o, fc, fm);
        ++stats.cells_evaluated;
        if (est.time_s < best_t || (est.time_s == best_t && est.energy_j < best_e)) {
          best = {o, fc, fm};
          best_t = est.time_s;
          best_e = est.energy_j;
        }
      }
    }
  }
  return {ctx.make_config(best.opt, best.fc, best.fm), stats};
}

}  // namespace joss
