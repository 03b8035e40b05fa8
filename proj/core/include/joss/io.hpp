#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "joss/dag.hpp"
#include "joss/models.hpp"
#include "joss/platform.hpp"
#include "joss/simengine.hpp"

namespace joss {

/// Platform/ground-truth config. The name "tx2-default" yields the built-in
/// defaults; anything else is read as a JSON file with "platform" and
/// "truth" objects.
PlatformSpec load_platform(const std::string& path_or_default);
GroundTruth load_truth(const std::string& path_or_default);
std::string default_config_json();

/// A generated task graph plus the oracle parameters of the kernels it uses.
struct WorkloadSpec {
  std::string type;     // chain | sparselu | forkjoin | mixed
  std::string kernel;   // chain kernel / fork kernel
  std::string kernel2;  // join kernel
  int n_tasks = 0;
  int dop = 1;
  int width = 0;
  int layers = 0;
  int blocks = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> pool;      // kernel pool for mixed graphs
  std::vector<KernelParams> kernels;  // oracle params to merge into the truth
};

WorkloadSpec load_workload(const std::string& path);
TaskDAG build_dag(const WorkloadSpec& w);
/// New ground truth with the workload's kernels merged in.
GroundTruth with_kernels(const GroundTruth& gt,
                         const std::vector<KernelParams>& kernels);

void save_profile_csv(const std::string& path, const std::vector<ProfileRow>& rows);
std::vector<ProfileRow> load_profile_csv(const std::string& path);

/// Model coefficients keyed by (cluster, n_cores, model kind), plus the
/// sampling points; JSON, idempotent across save/load.
void save_models(const std::string& path, const PlatformSpec& spec,
                 const ModelSet& models);
ModelSet load_models(const std::string& path);

std::string report_json(const RunReport& r, const std::string& config_hash);
std::string report_csv_header();
std::string report_csv_row(const RunReport& r, const std::string& config_hash);

/// FNV-1a over a canonical config string, hex-encoded.
std::string config_hash_hex(const std::string& canonical);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace joss
