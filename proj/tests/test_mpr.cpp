#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "joss/mpr.hpp"

using namespace joss;

TEST_CASE("coefficient counts and feature order") {
  CHECK(MprModel::coeff_count(1) == 3);
  CHECK(MprModel::coeff_count(2) == 6);
  CHECK(MprModel::coeff_count(3) == 10);

  auto names = feature_names(3);
  std::vector<std::string> want = {"x0",    "x1",    "x2",    "x0^2", "x1^2",
                                   "x2^2",  "x0*x1", "x0*x2", "x1*x2", "1"};
  CHECK(names == want);

  std::vector<double> x = {2.0, 3.0, 5.0};
  auto f = expand_features(x);
  std::vector<double> wantf = {2, 3, 5, 4, 9, 25, 6, 10, 15, 1};
  REQUIRE(f.size() == wantf.size());
  for (size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(wantf[i]));
}

TEST_CASE("fit recovers exact polynomials") {
  SUBCASE("constant function") {
    ProfileDataset d;
    d.n_vars = 2;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 30; ++i) d.add({u(rng), u(rng)}, 7.0);
    MprModel m = fit(d);
    REQUIRE(int(m.coeffs.size()) == MprModel::coeff_count(2));
    std::vector<double> x = {0.3, -1.2};
    CHECK(m.predict(x) == doctest::Approx(7.0).epsilon(1e-9));
  }
  SUBCASE("planted quadratic") {
    // y = 2*x0 + 3*x1^2 - 0.5*x0*x1 + 4
    ProfileDataset d;
    d.n_vars = 2;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto truth = [](double a, double b) {
      return 2 * a + 3 * b * b - 0.5 * a * b + 4;
    };
    for (int i = 0; i < 50; ++i) {
      double a = u(rng), b = u(rng);
      d.add({a, b}, truth(a, b));
    }
    MprModel m = fit(d);
    for (int i = 0; i < 20; ++i) {
      double a = u(rng), b = u(rng);
      std::vector<double> x = {a, b};
      CHECK(m.predict(x) == doctest::Approx(truth(a, b)).epsilon(1e-8));
    }
  }
  SUBCASE("three-variable planted model") {
    ProfileDataset d;
    d.n_vars = 3;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    auto truth = [](double a, double b, double c) {
      return a - 2 * b + 0.7 * c * c + 1.5 * a * c - 3;
    };
    for (int i = 0; i < 80; ++i) {
      double a = u(rng), b = u(rng), c = u(rng);
      d.add({a, b, c}, truth(a, b, c));
    }
    MprModel m = fit(d);
    for (int i = 0; i < 20; ++i) {
      double a = u(rng), b = u(rng), c = u(rng);
      std::vector<double> x = {a, b, c};
      CHECK(m.predict(x) == doctest::Approx(truth(a, b, c)).epsilon(1e-8));
    }
  }
}

TEST_CASE("fit error handling") {
  SUBCASE("under-determined dataset") {
    ProfileDataset d;
    d.n_vars = 2;
    d.add({1.0, 2.0}, 3.0);
    d.add({2.0, 1.0}, 4.0);
    CHECK_THROWS_AS(fit(d), std::invalid_argument);
  }
  SUBCASE("collinear columns named in the error") {
    // x1 held constant: x1, x1^2, and the intercept are collinear.
    ProfileDataset d;
    d.n_vars = 2;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 40; ++i) {
      double a = u(rng);
      d.add({a, 5.0}, a * a);
    }
    try {
      fit(d);
      FAIL("expected a rank-deficiency error");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("collinear") != std::string::npos);
      // At least one named column, e.g. "x1" or "x1^2".
      CHECK(msg.find("x") != std::string::npos);
    }
  }
}

TEST_CASE("predict validates input size") {
  MprModel m;
  m.n_vars = 2;
  m.coeffs.assign(MprModel::coeff_count(2), 0.0);
  std::vector<double> bad = {1.0};
  CHECK_THROWS(m.predict(bad));
}
