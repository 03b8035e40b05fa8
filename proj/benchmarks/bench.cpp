#include <benchmark/benchmark.h>

#include "joss/baselines.hpp"
#include "joss/dag.hpp"
#include "joss/models.hpp"
#include "joss/platform.hpp"
#include "joss/search.hpp"
#include "joss/simengine.hpp"

using namespace joss;

namespace {

struct Fixture {
  GroundTruth gt{default_tx2_spec(), default_tx2_truth()};
  ModelSet models;
  IdlePowerTable idle;
  std::vector<KernelTables> tables;

  Fixture() {
    auto ladder = synthetic_ladder(gt);
    auto rows = profile_grid(gt, ladder);
    auto sp = default_sampling_points(gt.spec());
    models = fit_models(gt.spec(), rows, sp);
    idle = measure_idle(gt);
    auto opts = core_option_list(gt.spec());
    for (const auto& k : random_kernels(gt, 50, 321)) {
      KernelProfile prof(k.name, opts.size());
      for (size_t o = 0; o < opts.size(); ++o) {
        Configuration hi{opts[o].cluster, opts[o].n_cores, sp.f_c_ref, sp.f_m_ref};
        Configuration lo{opts[o].cluster, opts[o].n_cores, sp.f_c_prime, sp.f_m_ref};
        prof.time_at_fc[o] = gt.time(k, hi);
        prof.time_at_fc_prime[o] = gt.time(k, lo);
        prof.mb[o] = estimate_mb(prof.time_at_fc[o], prof.time_at_fc_prime[o],
                                 sp.f_c_ref, sp.f_c_prime);
      }
      tables.push_back(build_tables(prof, models, gt.spec()));
    }
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void bm_exhaustive_search(benchmark::State& state) {
  Fixture& f = fixture();
  size_t i = 0;
  for (auto _ : state) {
    SearchContext ctx(f.gt.spec(), f.tables[i++ % f.tables.size()], f.idle, 1);
    benchmark::DoNotOptimize(exhaustive_min_energy(ctx));
  }
}
BENCHMARK(bm_exhaustive_search);

void bm_descent_search(benchmark::State& state) {
  Fixture& f = fixture();
  size_t i = 0;
  for (auto _ : state) {
    SearchContext ctx(f.gt.spec(), f.tables[i++ % f.tables.size()], f.idle, 1);
    benchmark::DoNotOptimize(steepest_descent_min_energy(ctx));
  }
}
BENCHMARK(bm_descent_search);

void bm_engine_throughput(benchmark::State& state) {
  Fixture& f = fixture();
  GroundTruthParams p = f.gt.params();
  p.kernels["bk"] = {"bk", 1.0, 0.8, 0.6, 0.02};
  GroundTruth gt(f.gt.spec(), std::move(p));
  int n = int(state.range(0));
  TaskDAG dag = gen_mixed(7, {"bk"}, n);
  for (auto _ : state) {
    SimEngine eng(gt, dag, 1);
    auto s = make_scheduler("joss", gt, f.models, {});
    benchmark::DoNotOptimize(eng.run(*s));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_engine_throughput)->Arg(1000)->Arg(10000);

void bm_table_build(benchmark::State& state) {
  Fixture& f = fixture();
  auto sp = default_sampling_points(f.gt.spec());
  auto opts = core_option_list(f.gt.spec());
  KernelParams k = random_kernels(f.gt, 1, 99)[0];
  KernelProfile prof(k.name, opts.size());
  for (size_t o = 0; o < opts.size(); ++o) {
    Configuration hi{opts[o].cluster, opts[o].n_cores, sp.f_c_ref, sp.f_m_ref};
    Configuration lo{opts[o].cluster, opts[o].n_cores, sp.f_c_prime, sp.f_m_ref};
    prof.time_at_fc[o] = f.gt.time(k, hi);
    prof.time_at_fc_prime[o] = f.gt.time(k, lo);
    prof.mb[o] = estimate_mb(prof.time_at_fc[o], prof.time_at_fc_prime[o],
                             sp.f_c_ref, sp.f_c_prime);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(build_tables(prof, f.models, f.gt.spec()));
}
BENCHMARK(bm_table_build);

}  // namespace

BENCHMARK_MAIN();
