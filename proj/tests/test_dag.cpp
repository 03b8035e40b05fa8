#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "joss/dag.hpp"

using namespace joss;

TEST_CASE("chain generator") {
  SUBCASE("dop=1 is a single path") {
    TaskDAG d = gen_chain("mm", 10, 1);
    CHECK(d.size() == 10);
    CHECK(d.longest_path() == 10);
    CHECK(d.dop() == doctest::Approx(1.0));
  }
  SUBCASE("two chains of five") {
    TaskDAG d = gen_chain("mc", 10, 2);
    CHECK(d.size() == 10);
    CHECK(d.longest_path() == 5);
    CHECK(d.dop() == doctest::Approx(2.0));
  }
  SUBCASE("single task") {
    TaskDAG d = gen_chain("k", 1, 1);
    CHECK(d.size() == 1);
    CHECK(d.dop() == doctest::Approx(1.0));
  }
  SUBCASE("non-divisible counts rejected") {
    CHECK_THROWS_AS(gen_chain("k", 10, 3), std::invalid_argument);
  }
}

TEST_CASE("sparselu generator") {
  SUBCASE("smallest grid is acyclic") {
    TaskDAG d = gen_sparselu(2);
    CHECK_NOTHROW(d.validate());
    CHECK(d.kernel_instances("lu0") == 2);
  }
  SUBCASE("bmod dominates large grids") {
    TaskDAG d = gen_sparselu(64);
    CHECK_NOTHROW(d.validate());
    double frac = double(d.kernel_instances("bmod")) / double(d.size());
    CHECK(frac > 0.88);
    CHECK(frac < 0.94);
  }
  SUBCASE("bmod fraction at moderate grids") {
    TaskDAG d = gen_sparselu(48);
    double frac = double(d.kernel_instances("bmod")) / double(d.size());
    CHECK(frac >= 0.85);
  }
}

TEST_CASE("forkjoin generator") {
  SUBCASE("degenerate single node") {
    TaskDAG d = gen_forkjoin("f", "j", 1, 1);
    CHECK(d.size() == 1);
  }
  SUBCASE("two layers of width four") {
    TaskDAG d = gen_forkjoin("f", "j", 4, 2);
    CHECK(d.size() == 8);
    CHECK(d.longest_path() == 2);
    CHECK(d.dop() == doctest::Approx(4.0));
  }
  SUBCASE("node count is width times layers") {
    TaskDAG d = gen_forkjoin("f", "j", 7, 6);
    CHECK(d.size() == 42);
    CHECK_NOTHROW(d.validate());
  }
}

TEST_CASE("mixed generator") {
  std::vector<std::string> pool = {"a", "b"};
  SUBCASE("deterministic per seed") {
    TaskDAG d1 = gen_mixed(42, pool, 500);
    TaskDAG d2 = gen_mixed(42, pool, 500);
    std::ostringstream s1, s2;
    d1.save(s1);
    d2.save(s2);
    CHECK(s1.str() == s2.str());
    TaskDAG d3 = gen_mixed(43, pool, 500);
    std::ostringstream s3;
    d3.save(s3);
    CHECK(s1.str() != s3.str());
  }
  SUBCASE("zero tasks rejected") {
    CHECK_THROWS_AS(gen_mixed(1, pool, 0), std::invalid_argument);
  }
  SUBCASE("all pool kernels appear") {
    TaskDAG d = gen_mixed(7, pool, 1000);
    CHECK(d.kernel_instances("a") > 0);
    CHECK(d.kernel_instances("b") > 0);
    CHECK(d.kernel_instances("a") + d.kernel_instances("b") == 1000);
  }
  SUBCASE("generators produce valid DAGs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TaskDAG d = gen_mixed(seed, pool, 200);
      CHECK_NOTHROW(d.validate());
      CHECK(d.dop() == doctest::Approx(double(d.size()) / d.longest_path()));
    }
  }
}

TEST_CASE("serialization round trip") {
  TaskDAG d = gen_sparselu(4);
  std::ostringstream os;
  d.save(os);
  std::istringstream is(os.str());
  TaskDAG d2 = TaskDAG::load(is);
  REQUIRE(d2.size() == d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    CHECK(d2.task(i).kernel == d.task(i).kernel);
    CHECK(d2.task(i).preds == d.task(i).preds);
  }
}

TEST_CASE("validation catches malformed graphs") {
  SUBCASE("dangling predecessor") {
    std::istringstream is("0 a 1\n");
    CHECK_THROWS(TaskDAG::load(is).validate());
  }
  SUBCASE("cycle") {
    std::istringstream is("0 a 1\n1 a 0\n");
    CHECK_THROWS_AS(TaskDAG::load(is).validate(), std::invalid_argument);
  }
}
