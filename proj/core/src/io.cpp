#include "joss/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace joss {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json spec_to_json(const PlatformSpec& spec) {
  json j;
  for (const auto& c : spec.clusters) {
    j["clusters"].push_back({{"name", c.name},
                             {"core_count", c.core_count},
                             {"core_freqs_ghz", c.core_freqs_ghz},
                             {"perf_class", c.perf_class}});
  }
  j["mem_freqs_ghz"] = spec.mem_freqs_ghz;
  j["cpu_dvfs_latency_s"] = spec.cpu_dvfs_latency_s;
  j["mem_dvfs_latency_s"] = spec.mem_dvfs_latency_s;
  j["power_sample_period_s"] = spec.power_sample_period_s;
  return j;
}

PlatformSpec spec_from_json(const json& j) {
  PlatformSpec spec;
  for (const auto& c : j.at("clusters")) {
    ClusterSpec cs;
    cs.name = c.at("name");
    cs.core_count = c.at("core_count");
    cs.core_freqs_ghz = c.at("core_freqs_ghz").get<std::vector<double>>();
    cs.perf_class = c.value("perf_class", "");
    spec.clusters.push_back(std::move(cs));
  }
  spec.mem_freqs_ghz = j.at("mem_freqs_ghz").get<std::vector<double>>();
  spec.cpu_dvfs_latency_s = j.value("cpu_dvfs_latency_s", spec.cpu_dvfs_latency_s);
  spec.mem_dvfs_latency_s = j.value("mem_dvfs_latency_s", spec.mem_dvfs_latency_s);
  spec.power_sample_period_s =
      j.value("power_sample_period_s", spec.power_sample_period_s);
  spec.validate();
  return spec;
}

json kernel_to_json(const KernelParams& k) {
  return {{"name", k.name},
          {"ops_g", k.ops_g},
          {"bytes_gb", k.bytes_gb},
          {"kappa", k.kappa},
          {"mu", k.mu}};
}

KernelParams kernel_from_json(const json& j) {
  KernelParams k;
  k.name = j.at("name");
  k.ops_g = j.at("ops_g");
  k.bytes_gb = j.at("bytes_gb");
  k.kappa = j.value("kappa", 0.5);
  k.mu = j.value("mu", 0.0);
  return k;
}

json truth_to_json(const GroundTruthParams& p) {
  json j;
  for (const auto& c : p.clusters) {
    json e, bw;
    for (const auto& [n, v] : c.eff) e[std::to_string(n)] = v;
    for (const auto& [n, v] : c.bw_gbps) bw[std::to_string(n)] = v;
    j["clusters"].push_back({{"ipc", c.ipc},
                             {"eff", e},
                             {"bw_gbps", bw},
                             {"alpha", c.alpha},
                             {"beta", c.beta},
                             {"v0", c.v0},
                             {"v1", c.v1},
                             {"iota", c.iota}});
  }
  j["delta0"] = p.delta0;
  j["delta1"] = p.delta1;
  j["rho0"] = p.rho0;
  j["rho1"] = p.rho1;
  for (const auto& [name, k] : p.kernels) j["kernels"].push_back(kernel_to_json(k));
  j["noise_enabled"] = p.noise_enabled;
  j["noise_sigma"] = p.noise_sigma;
  j["noise_seed"] = p.noise_seed;
  return j;
}

GroundTruthParams truth_from_json(const json& j) {
  GroundTruthParams p;
  for (const auto& c : j.at("clusters")) {
    ClusterTruth ct;
    ct.ipc = c.at("ipc");
    for (auto it = c.at("eff").begin(); it != c.at("eff").end(); ++it)
      ct.eff[std::stoi(it.key())] = it.value().get<double>();
    for (auto it = c.at("bw_gbps").begin(); it != c.at("bw_gbps").end(); ++it)
      ct.bw_gbps[std::stoi(it.key())] = it.value().get<double>();
    ct.alpha = c.at("alpha");
    ct.beta = c.at("beta");
    ct.v0 = c.at("v0");
    ct.v1 = c.at("v1");
    ct.iota = c.at("iota");
    p.clusters.push_back(std::move(ct));
  }
  p.delta0 = j.at("delta0");
  p.delta1 = j.at("delta1");
  p.rho0 = j.at("rho0");
  p.rho1 = j.at("rho1");
  if (j.contains("kernels"))
    for (const auto& k : j.at("kernels")) {
      auto kp = kernel_from_json(k);
      p.kernels[kp.name] = kp;
    }
  p.noise_enabled = j.value("noise_enabled", false);
  p.noise_sigma = j.value("noise_sigma", 0.0);
  p.noise_seed = j.value("noise_seed", std::uint64_t{0});
  return p;
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

std::string default_config_json() {
  json j;
  j["platform"] = spec_to_json(default_tx2_spec());
  j["truth"] = truth_to_json(default_tx2_truth());
  return j.dump(2) + "\n";
}

PlatformSpec load_platform(const std::string& path_or_default) {
  if (path_or_default == "tx2-default") return default_tx2_spec();
  return spec_from_json(parse_file(path_or_default).at("platform"));
}

GroundTruth load_truth(const std::string& path_or_default) {
  if (path_or_default == "tx2-default")
    return GroundTruth(default_tx2_spec(), default_tx2_truth());
  json j = parse_file(path_or_default);
  return GroundTruth(spec_from_json(j.at("platform")),
                     truth_from_json(j.at("truth")));
}

WorkloadSpec load_workload(const std::string& path) {
  json j = parse_file(path);
  WorkloadSpec w;
  w.type = j.at("type");
  w.kernel = j.value("kernel", "");
  w.kernel2 = j.value("kernel2", "");
  w.n_tasks = j.value("n_tasks", 0);
  w.dop = j.value("dop", 1);
  w.width = j.value("width", 0);
  w.layers = j.value("layers", 0);
  w.blocks = j.value("blocks", 0);
  w.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("pool")) w.pool = j.at("pool").get<std::vector<std::string>>();
  if (j.contains("kernels"))
    for (const auto& k : j.at("kernels")) w.kernels.push_back(kernel_from_json(k));
  return w;
}

TaskDAG build_dag(const WorkloadSpec& w) {
  if (w.type == "chain") return gen_chain(w.kernel, w.n_tasks, w.dop);
  if (w.type == "sparselu") return gen_sparselu(w.blocks);
  if (w.type == "forkjoin")
    return gen_forkjoin(w.kernel, w.kernel2.empty() ? w.kernel : w.kernel2,
                        w.width, w.layers);
  if (w.type == "mixed") return gen_mixed(w.seed, w.pool, w.n_tasks);
  throw std::invalid_argument("workload: unknown type " + w.type);
}

GroundTruth with_kernels(const GroundTruth& gt,
                         const std::vector<KernelParams>& kernels) {
  GroundTruthParams p = gt.params();
  for (const auto& k : kernels) p.kernels[k.name] = k;
  return GroundTruth(gt.spec(), std::move(p));
}

void save_profile_csv(const std::string& path, const std::vector<ProfileRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "kernel,cluster,n_cores,f_c,f_m,time_s,cpu_w,mem_w\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.kernel << ',' << r.cluster << ',' << r.n_cores << ',' << r.f_c << ','
        << r.f_m << ',' << r.time_s << ',' << r.cpu_w << ',' << r.mem_w << '\n';
  }
}

std::vector<ProfileRow> load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ProfileRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ProfileRow r;
    std::string field;
    std::getline(ls, r.kernel, ',');
    std::getline(ls, field, ',');
    r.cluster = std::stoi(field);
    std::getline(ls, field, ',');
    r.n_cores = std::stoi(field);
    std::getline(ls, field, ',');
    r.f_c = std::stod(field);
    std::getline(ls, field, ',');
    r.f_m = std::stod(field);
    std::getline(ls, field, ',');
    r.time_s = std::stod(field);
    std::getline(ls, field, ',');
    r.cpu_w = std::stod(field);
    std::getline(ls, field, ',');
    r.mem_w = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_models(const std::string& path, const PlatformSpec& spec,
                 const ModelSet& models) {
  auto options = core_option_list(spec);
  if (options.size() != models.options.size())
    throw std::invalid_argument("save_models: model count does not match platform");
  ordered_json j;
  j["sampling"] = {{"f_c_ref", models.sampling.f_c_ref},
                   {"f_c_prime", models.sampling.f_c_prime},
                   {"f_m_ref", models.sampling.f_m_ref}};
  for (size_t i = 0; i < options.size(); ++i) {
    ordered_json o;
    o["cluster"] = options[i].cluster;
    o["n_cores"] = options[i].n_cores;
    o["stall"] = models.options[i].stall.coeffs;
    o["cpu"] = models.options[i].cpu.coeffs;
    o["mem"] = models.options[i].mem.coeffs;
    j["options"].push_back(std::move(o));
  }
  write_text_file(path, j.dump(2) + "\n");
}

ModelSet load_models(const std::string& path) {
  json j = parse_file(path);
  ModelSet m;
  m.sampling.f_c_ref = j.at("sampling").at("f_c_ref");
  m.sampling.f_c_prime = j.at("sampling").at("f_c_prime");
  m.sampling.f_m_ref = j.at("sampling").at("f_m_ref");
  for (const auto& o : j.at("options")) {
    OptionModels om;
    om.stall = MprModel{3, o.at("stall").get<std::vector<double>>()};
    om.cpu = MprModel{2, o.at("cpu").get<std::vector<double>>()};
    om.mem = MprModel{3, o.at("mem").get<std::vector<double>>()};
    m.options.push_back(std::move(om));
  }
  return m;
}

static ordered_json report_to_json(const RunReport& r, const std::string& hash) {
  ordered_json j;
  j["scheduler"] = r.scheduler;
  j["seed"] = r.seed;
  j["config_hash"] = hash;
  j["makespan_s"] = r.makespan_s;
  j["cpu_j"] = r.cpu_j;
  j["mem_j"] = r.mem_j;
  j["total_j"] = r.total_j();
  j["idle_j"] = r.idle_j;
  j["attributed_j"] = r.attributed_j;
  j["unattributed_idle_j"] = r.unattributed_idle_j;
  if (r.sampled_cpu_j) j["sampled_cpu_j"] = *r.sampled_cpu_j;
  if (r.sampled_mem_j) j["sampled_mem_j"] = *r.sampled_mem_j;
  j["sampling_overhead_fraction"] = r.sampling_overhead_fraction;
  j["search_cells_evaluated"] = r.search_cells_evaluated;
  j["search_steps"] = r.search_steps;
  j["tasks_executed"] = r.tasks_executed;
  for (const auto& [k, cfg] : r.kernel_configs) {
    j["kernel_configs"][k] = {{"cluster", cfg.cluster},
                              {"n_cores", cfg.n_cores},
                              {"f_c", cfg.f_c},
                              {"f_m", cfg.f_m}};
  }
  for (const auto& [k, h] : r.kernel_selection_hints)
    j["kernel_selection_hints"][k] = h;
  return j;
}

std::string report_json(const RunReport& r, const std::string& config_hash) {
  return report_to_json(r, config_hash).dump(2) + "\n";
}

std::string report_csv_header() {
  return "scheduler,seed,config_hash,makespan_s,cpu_j,mem_j,total_j,idle_j,"
         "sampling_overhead_fraction,search_cells_evaluated,tasks_executed";
}

std::string report_csv_row(const RunReport& r, const std::string& config_hash) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << r.scheduler << ',' << r.seed << ',' << config_hash << ',' << r.makespan_s
     << ',' << r.cpu_j << ',' << r.mem_j << ',' << r.total_j() << ',' << r.idle_j
     << ',' << r.sampling_overhead_fraction << ',' << r.search_cells_evaluated << ','
     << r.tasks_executed;
  return os.str();
}

std::string config_hash_hex(const std::string& canonical) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace joss
