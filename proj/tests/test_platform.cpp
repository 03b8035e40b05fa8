#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "joss/platform.hpp"

using namespace joss;

namespace {

// A single-cluster machine with unit coefficients for hand evaluation.
PlatformSpec unit_spec() {
  PlatformSpec s;
  s.clusters.push_back({"c0", 1, {1.02, 2.04}, "unit"});
  s.mem_freqs_ghz = {0.935, 1.87};
  return s;
}

GroundTruthParams unit_truth() {
  GroundTruthParams p;
  ClusterTruth c;
  c.ipc = 1.0;
  c.eff[1] = 1.0;
  c.bw_gbps[1] = 10.0;
  c.alpha = 1.0;
  c.beta = 0.5;
  c.v0 = 0.0;
  c.v1 = 1.0;
  c.iota = 0.1;
  p.clusters.push_back(c);
  p.delta0 = 1.0;
  p.delta1 = 0.0;
  p.rho0 = 0.1;
  p.rho1 = 0.2;
  return p;
}

}  // namespace

TEST_CASE("oracle time formula") {
  GroundTruth gt(unit_spec(), unit_truth());
  Configuration top{0, 1, 2.04, 1.87};

  SUBCASE("empty task is instantaneous") {
    KernelParams k{"empty", 0.0, 0.0, 0.5, 0.0};
    CHECK(gt.time(k, top) == 0.0);
  }
  SUBCASE("pure compute: ops over effective rate") {
    KernelParams k{"comp", 2.04, 0.0, 0.5, 0.0};
    CHECK(gt.time(k, top) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("kappa=0, mu=0 removes memory-frequency dependence") {
    KernelParams k{"issue", 1.0, 5.0, 0.0, 0.0};
    Configuration lo_m{0, 1, 2.04, 0.935};
    CHECK(gt.time(k, top) == gt.time(k, lo_m));
  }
  SUBCASE("time non-increasing in both frequencies for kappa>0") {
    KernelParams k{"mix", 1.0, 5.0, 0.7, 0.1};
    Configuration base{0, 1, 1.02, 0.935};
    CHECK(gt.time(k, {0, 1, 2.04, 0.935}) <= gt.time(k, base));
    CHECK(gt.time(k, {0, 1, 1.02, 1.87}) <= gt.time(k, base));
  }
  SUBCASE("invalid configuration rejected") {
    KernelParams k{"x", 1.0, 0.0, 0.5, 0.0};
    CHECK_THROWS_AS(gt.time(k, {0, 1, 1.5, 1.87}), std::invalid_argument);
    CHECK_THROWS_AS(gt.time(k, {0, 3, 2.04, 1.87}), std::invalid_argument);
    CHECK_THROWS_AS(gt.time(k, {1, 1, 2.04, 1.87}), std::invalid_argument);
  }
}

TEST_CASE("oracle CPU power formula") {
  GroundTruth gt(unit_spec(), unit_truth());
  KernelParams k{"x", 1.0, 1.0, 0.5, 0.0};

  SUBCASE("hand evaluation at unit coefficients") {
    // n=1, alpha=1, beta=0.5, v0=0, v1=1: P = f^3 * (1 - 0.5*mb)
    auto p = unit_truth();
    p.clusters[0].v1 = 1.0;
    auto s = unit_spec();
    s.clusters[0].core_freqs_ghz = {0.5, 1.0};
    GroundTruth g2(s, p);
    CHECK(g2.cpu_power(k, {0, 1, 1.0, 1.87}, 0.0) == doctest::Approx(1.0));
    CHECK(g2.cpu_power(k, {0, 1, 1.0, 1.87}, 1.0) ==
          doctest::Approx(0.5 * g2.cpu_power(k, {0, 1, 1.0, 1.87}, 0.0)));
  }
  SUBCASE("zero activity coefficient") {
    auto p = unit_truth();
    p.clusters[0].alpha = 0.0;
    GroundTruth g2(unit_spec(), p);
    CHECK(g2.cpu_power(k, {0, 1, 2.04, 1.87}, 0.3) == 0.0);
  }
}

TEST_CASE("oracle memory power formula") {
  auto p = unit_truth();
  SUBCASE("frequency term only") {
    p.delta0 = 1.0;
    p.delta1 = 0.0;
    GroundTruth gt(unit_spec(), p);
    KernelParams k{"x", 1.0, 0.0, 0.5, 0.0};
    CHECK(gt.mem_power(k, {0, 1, 2.04, 1.87}, 0.0) == doctest::Approx(1.87));
  }
  SUBCASE("traffic linearity") {
    p.delta0 = 0.0;
    p.delta1 = 0.5;
    GroundTruth gt(unit_spec(), p);
    KernelParams k{"x", 1.0, 0.0, 0.5, 0.0};
    CHECK(gt.mem_power(k, {0, 1, 2.04, 1.87}, 4.0) ==
          doctest::Approx(2.0 * gt.mem_power(k, {0, 1, 2.04, 1.87}, 2.0)));
  }
  SUBCASE("no traffic, no frequency coefficient") {
    p.delta0 = 0.0;
    GroundTruth gt(unit_spec(), p);
    KernelParams k{"x", 0.0, 0.0, 0.5, 0.0};
    CHECK(gt.mem_power(k, {0, 1, 2.04, 1.87}, 0.0) == 0.0);
  }
}

TEST_CASE("default platform") {
  PlatformSpec spec = default_tx2_spec();
  spec.validate();
  REQUIRE(spec.clusters.size() == 2);
  CHECK(spec.clusters[0].name == "denver");
  CHECK(spec.clusters[0].core_count == 2);
  CHECK(spec.clusters[1].name == "a57");
  CHECK(spec.clusters[1].core_count == 4);

  auto has = [](const std::vector<double>& v, double x) {
    for (double f : v)
      if (f == doctest::Approx(x).epsilon(1e-12)) return true;
    return false;
  };
  for (double f : {1.11, 1.57, 2.04})
    CHECK(has(spec.clusters[0].core_freqs_ghz, f));
  for (double f : {0.80, 1.33, 1.87}) CHECK(has(spec.mem_freqs_ghz, f));
  CHECK(spec.max_core_freq() == doctest::Approx(2.04));
  CHECK(spec.max_mem_freq() == doctest::Approx(1.87));
  CHECK(spec.clusters[0].core_freqs_ghz == spec.clusters[1].core_freqs_ghz);
  CHECK(spec.core_options() == 5);  // (log2(2)+1) + (log2(4)+1)

  CHECK(spec.clusters[1].allowed_core_counts() == std::vector<int>{1, 2, 4});
}

TEST_CASE("default truth properties") {
  GroundTruth gt(default_tx2_spec(), default_tx2_truth());
  KernelParams pure{"pure", 10.0, 0.0, 0.5, 0.0};
  double td = gt.time(pure, {0, 1, 2.04, 1.87});
  double ta = gt.time(pure, {1, 1, 2.04, 1.87});
  double ipc_ratio = gt.params().clusters[0].ipc / gt.params().clusters[1].ipc;
  CHECK(ta / td == doctest::Approx(ipc_ratio).epsilon(1e-12));
  CHECK(ipc_ratio == doctest::Approx(3.4));

  SUBCASE("deterministic with noise disabled") {
    KernelParams k{"k", 3.0, 2.0, 0.8, 0.1};
    Configuration cfg{1, 2, 1.11, 0.80};
    CHECK(gt.time(k, cfg) == gt.time(k, cfg));
    CHECK(gt.noise_factor(k, cfg) == 1.0);
  }
  SUBCASE("noise is seeded and per-(kernel, config)") {
    auto p = default_tx2_truth();
    p.noise_enabled = true;
    p.noise_sigma = 0.05;
    p.noise_seed = 7;
    GroundTruth g2(default_tx2_spec(), p);
    KernelParams k{"k", 3.0, 2.0, 0.8, 0.1};
    double f1 = g2.noise_factor(k, {0, 1, 2.04, 1.87});
    CHECK(f1 == g2.noise_factor(k, {0, 1, 2.04, 1.87}));
    CHECK(f1 != g2.noise_factor(k, {0, 1, 1.11, 1.87}));
    CHECK(f1 > 0.0);
  }
}

TEST_CASE("spec validation") {
  PlatformSpec s = unit_spec();
  SUBCASE("descending ladder rejected") {
    s.clusters[0].core_freqs_ghz = {2.04, 1.02};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SUBCASE("clusters must share the core ladder") {
    s.clusters.push_back({"c1", 2, {1.0, 2.0}, ""});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SUBCASE("empty memory ladder rejected") {
    s.mem_freqs_ghz.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SUBCASE("truth validation") {
    auto p = unit_truth();
    p.clusters[0].eff[1] = 0.9;
    CHECK_THROWS_AS(p.validate(unit_spec()), std::invalid_argument);
    p = unit_truth();
    p.kernels["bad"] = {"bad", 1.0, 1.0, 1.5, 0.0};
    CHECK_THROWS_AS(p.validate(unit_spec()), std::invalid_argument);
  }
}
