#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "joss/io.hpp"
#include "joss/simengine.hpp"

using namespace joss;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("joss_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("built-in platform and truth") {
  PlatformSpec spec = load_platform("tx2-default");
  CHECK(spec.clusters.size() == 2);
  GroundTruth gt = load_truth("tx2-default");
  CHECK(gt.spec().total_cores() == 6);
}

TEST_CASE("config round trip through json") {
  TempDir tmp;
  std::string path = tmp.file("config.json");
  write_text_file(path, default_config_json());
  PlatformSpec spec = load_platform(path);
  PlatformSpec builtin = load_platform("tx2-default");
  CHECK(spec.clusters.size() == builtin.clusters.size());
  CHECK(spec.mem_freqs_ghz == builtin.mem_freqs_ghz);
  CHECK(spec.clusters[0].core_freqs_ghz == builtin.clusters[0].core_freqs_ghz);
  GroundTruth gt = load_truth(path);
  CHECK(gt.params().clusters[0].ipc == doctest::Approx(3.4));
}

TEST_CASE("profile csv round trip") {
  GroundTruth gt = load_truth("tx2-default");
  auto ladder = synthetic_ladder(gt);
  auto rows = profile_grid(gt, ladder);
  // 41 kernels x 5 core options x 10 core freqs x 5 memory freqs
  CHECK(rows.size() == 10250u);
  TempDir tmp;
  std::string path = tmp.file("profile.csv");
  save_profile_csv(path, rows);
  auto rows2 = load_profile_csv(path);
  REQUIRE(rows2.size() == rows.size());
  for (size_t i = 0; i < rows.size(); i += 997) {
    CHECK(rows2[i].kernel == rows[i].kernel);
    CHECK(rows2[i].cluster == rows[i].cluster);
    CHECK(rows2[i].n_cores == rows[i].n_cores);
    CHECK(rows2[i].f_c == rows[i].f_c);
    CHECK(rows2[i].f_m == rows[i].f_m);
    CHECK(rows2[i].time_s == rows[i].time_s);
    CHECK(rows2[i].cpu_w == rows[i].cpu_w);
    CHECK(rows2[i].mem_w == rows[i].mem_w);
  }
}

TEST_CASE("model serialization is idempotent") {
  GroundTruth gt = load_truth("tx2-default");
  auto rows = profile_grid(gt, synthetic_ladder(gt));
  ModelSet models = fit_models(gt.spec(), rows, default_sampling_points(gt.spec()));
  TempDir tmp;
  std::string p1 = tmp.file("m1.json"), p2 = tmp.file("m2.json");
  save_models(p1, gt.spec(), models);
  ModelSet loaded = load_models(p1);
  save_models(p2, gt.spec(), loaded);
  CHECK(read_text_file(p1) == read_text_file(p2));
  REQUIRE(loaded.options.size() == models.options.size());
  for (size_t o = 0; o < models.options.size(); ++o) {
    CHECK(loaded.options[o].stall.coeffs == models.options[o].stall.coeffs);
    CHECK(loaded.options[o].cpu.coeffs == models.options[o].cpu.coeffs);
    CHECK(loaded.options[o].mem.coeffs == models.options[o].mem.coeffs);
  }
  CHECK(loaded.sampling.f_c_ref == models.sampling.f_c_ref);
  CHECK(loaded.sampling.f_c_prime == models.sampling.f_c_prime);
}

TEST_CASE("workload specs build graphs") {
  TempDir tmp;
  std::string path = tmp.file("wl.json");
  write_text_file(path, R"({
    "type": "chain",
    "kernel": "k",
    "n_tasks": 12,
    "dop": 3,
    "kernels": [
      {"name": "k", "ops_g": 2.0, "bytes_gb": 1.0, "kappa": 0.7, "mu": 0.05}
    ]
  })");
  WorkloadSpec w = load_workload(path);
  CHECK(w.type == "chain");
  TaskDAG dag = build_dag(w);
  CHECK(dag.size() == 12);
  CHECK(dag.dop() == doctest::Approx(3.0));
  GroundTruth gt = with_kernels(load_truth("tx2-default"), w.kernels);
  CHECK(gt.kernel("k").ops_g == doctest::Approx(2.0));
  CHECK(gt.kernel("k").kappa == doctest::Approx(0.7));
}

TEST_CASE("run reports serialize deterministically") {
  RunReport r;
  r.scheduler = "demo";
  r.seed = 17;
  r.makespan_s = 1.25;
  r.cpu_j = 3.5;
  r.mem_j = 1.5;
  r.attributed_j = 4.0;
  r.unattributed_idle_j = 1.0;
  r.idle_j = 2.0;
  r.tasks_executed = 9;
  r.kernel_configs["k"] = Configuration{1, 2, 1.57, 1.33};
  r.kernel_selection_hints["k"] = 3;
  std::string h = config_hash_hex("canonical-string");
  std::string j1 = report_json(r, h);
  std::string j2 = report_json(r, h);
  CHECK(j1 == j2);
  CHECK(j1.find("\"demo\"") != std::string::npos);
  CHECK(j1.find(h) != std::string::npos);
  // total energy is cpu + mem
  CHECK(j1.find("\"total_j\": 5.0") != std::string::npos);

  std::string header = report_csv_header();
  std::string row = report_csv_row(r, h);
  // same column count in header and row
  auto count = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  CHECK(count(header) == count(row));
}

TEST_CASE("config hash") {
  std::string a = config_hash_hex("abc");
  std::string b = config_hash_hex("abc");
  std::string c = config_hash_hex("abd");
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 16);  // 64-bit FNV-1a in hex
  for (char ch : a) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
}

TEST_CASE("text file helpers") {
  TempDir tmp;
  std::string p = tmp.file("t.txt");
  write_text_file(p, "hello\nworld\n");
  CHECK(read_text_file(p) == "hello\nworld\n");
  CHECK_THROWS(read_text_file(tmp.file("missing.txt")));
}
