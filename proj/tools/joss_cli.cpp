// Experiment harness: profile -> fit -> run -> compare -> sweep.
#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "joss/baselines.hpp"
#include "joss/io.hpp"
#include "joss/models.hpp"
#include "joss/sched.hpp"
#include "joss/search.hpp"
#include "joss/simengine.hpp"

namespace {

using namespace joss;

struct CommonArgs {
  std::string platform = "tx2-default";
  std::string workload;
  std::string scheduler = "joss";
  std::string goal = "min_energy";
  std::string models_path;
  std::string out;
  std::string trace_path;
  std::uint64_t seed = 0;
  bool oracle_tables = false;
};

GroundTruth truth_with_workload(const CommonArgs& a, const WorkloadSpec& w) {
  GroundTruth gt = load_truth(a.platform);
  // Synthetic-ladder kernels are always resolvable by name.
  GroundTruth merged = with_kernels(gt, synthetic_ladder(gt));
  return with_kernels(merged, w.kernels);
}

ModelSet models_for(const CommonArgs& a, const GroundTruth& gt) {
  if (!a.models_path.empty()) return load_models(a.models_path);
  auto rows = profile_grid(gt, synthetic_ladder(gt));
  return fit_models(gt.spec(), rows, default_sampling_points(gt.spec()));
}

std::string canonical_config(const CommonArgs& a) {
  std::ostringstream os;
  os << a.platform << '|' << a.workload << '|' << a.scheduler << '|' << a.goal
     << '|' << a.seed << '|' << a.oracle_tables;
  return os.str();
}

RunReport run_one(const CommonArgs& a, const GroundTruth& gt, const TaskDAG& dag,
                  const ModelSet& models, const std::string& sched_name) {
  SchedOptions opt;
  opt.goal = parse_goal(a.goal);
  opt.oracle_tables = a.oracle_tables;
  auto sched = make_scheduler(sched_name, gt, models, opt);
  SimEngine eng(gt, dag, a.seed);
  std::vector<std::string> trace;
  if (!a.trace_path.empty()) eng.set_trace(&trace);
  RunReport report = eng.run(*sched);
  report.seed = a.seed;
  if (!a.trace_path.empty()) {
    std::ostringstream os;
    for (const auto& line : trace) os << line << '\n';
    write_text_file(a.trace_path, os.str());
  }
  return report;
}

int cmd_profile(const CommonArgs& a) {
  GroundTruth gt = load_truth(a.platform);
  auto rows = profile_grid(gt, synthetic_ladder(gt));
  save_profile_csv(a.out, rows);
  std::cout << "wrote " << rows.size() << " profile rows to " << a.out << "\n";
  return 0;
}

int cmd_fit(const CommonArgs& a, const std::string& profile_path) {
  GroundTruth gt = load_truth(a.platform);
  auto rows = load_profile_csv(profile_path);
  auto sampling = default_sampling_points(gt.spec());
  ModelSet models = fit_models(gt.spec(), rows, sampling);
  save_models(a.out, gt.spec(), models);

  // Training accuracy, median per target.
  std::vector<double> acc_t, acc_c, acc_m;
  auto options = core_option_list(gt.spec());
  for (const auto& r : rows) {
    int opt = core_option_index(gt.spec(), r.cluster, r.n_cores);
    const auto& k = gt.kernel(r.kernel);
    Configuration ref{r.cluster, r.n_cores, sampling.f_c_ref, sampling.f_m_ref};
    Configuration alt{r.cluster, r.n_cores, sampling.f_c_prime, sampling.f_m_ref};
    double mb = estimate_mb(gt.time(k, ref), gt.time(k, alt), sampling.f_c_ref,
                            sampling.f_c_prime);
    double pt = predict_time(gt.time(k, ref), mb, sampling.f_c_ref, r.f_c,
                             sampling.f_m_ref, r.f_m, models.options[opt].stall);
    acc_t.push_back(accuracy(r.time_s, pt));
    acc_c.push_back(accuracy(r.cpu_w, predict_cpu_power(mb, r.f_c,
                                                        models.options[opt].cpu)));
    acc_m.push_back(accuracy(
        r.mem_w, predict_mem_power(mb, r.f_c, r.f_m, models.options[opt].mem)));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v[v.size() / 2];
  };
  std::cout << "fit " << models.options.size() << " option models ("
            << options.size() << " core options)\n"
            << std::setprecision(4) << "median training accuracy: time "
            << median(acc_t) << ", cpu power " << median(acc_c) << ", mem power "
            << median(acc_m) << "\n";
  return 0;
}

int cmd_run(const CommonArgs& a) {
  WorkloadSpec w = load_workload(a.workload);
  GroundTruth gt = truth_with_workload(a, w);
  TaskDAG dag = build_dag(w);
  ModelSet models = models_for(a, gt);
  RunReport report = run_one(a, gt, dag, models, a.scheduler);
  std::string hash = config_hash_hex(canonical_config(a));
  std::filesystem::create_directories(a.out);
  write_text_file(a.out + "/report_" + a.scheduler + ".json",
                  report_json(report, hash));
  write_text_file(a.out + "/summary_" + a.scheduler + ".csv",
                  report_csv_header() + "\n" + report_csv_row(report, hash) + "\n");
  std::cout << report_csv_header() << "\n" << report_csv_row(report, hash) << "\n";
  return 0;
}

int cmd_compare(const CommonArgs& a, std::vector<std::string> schedulers) {
  if (schedulers.empty()) schedulers = scheduler_names();
  WorkloadSpec w = load_workload(a.workload);
  GroundTruth gt = truth_with_workload(a, w);
  TaskDAG dag = build_dag(w);
  ModelSet models = models_for(a, gt);

  std::vector<RunReport> reports;
  for (const auto& s : schedulers)
    reports.push_back(run_one(a, gt, dag, models, s));
  double grws_j = 0.0;
  for (const auto& r : reports)
    if (r.scheduler == "grws") grws_j = r.total_j();

  std::ostringstream os;
  os << "scheduler,total_j,normalized_to_grws,makespan_s\n" << std::setprecision(10);
  for (const auto& r : reports) {
    os << r.scheduler << ',' << r.total_j() << ','
       << (grws_j > 0.0 ? r.total_j() / grws_j : 0.0) << ',' << r.makespan_s << '\n';
  }
  std::cout << os.str();
  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    write_text_file(a.out + "/compare.csv", os.str());
    std::string hash = config_hash_hex(canonical_config(a));
    for (const auto& r : reports)
      write_text_file(a.out + "/report_" + r.scheduler + ".json",
                      report_json(r, hash));
  }
  return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& kernel) {
  GroundTruth gt = load_truth(a.platform);
  gt = with_kernels(gt, synthetic_ladder(gt));
  const auto& k = gt.kernel(kernel);
  std::ostringstream os;
  os << "cluster,n_cores,f_c,f_m,time_s,cpu_w,mem_w,energy_j\n"
     << std::setprecision(17);
  for (const auto& o : core_option_list(gt.spec())) {
    for (double fc : gt.spec().clusters[o.cluster].core_freqs_ghz) {
      for (double fm : gt.spec().mem_freqs_ghz) {
        Configuration cfg{o.cluster, o.n_cores, fc, fm};
        double t = gt.time(k, cfg);
        double cw = gt.cpu_power_at(k, cfg);
        double mw = gt.mem_power_at(k, cfg);
        // Solo-task energy: dynamic plus the full idle of its own cluster
        // and the memory system.
        double e = t * (cw + mw + gt.idle_cpu_power(o.cluster, fc) +
                        gt.idle_mem_power(fm));
        os << o.cluster << ',' << o.n_cores << ',' << fc << ',' << fm << ',' << t
           << ',' << cw << ',' << mw << ',' << e << '\n';
      }
    }
  }
  write_text_file(a.out, os.str());
  std::cout << "wrote sweep for " << kernel << " to " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymmetric-multicore scheduling simulator harness"};
  app.require_subcommand(1);
  CommonArgs a;
  std::string profile_path, kernel;
  std::vector<std::string> schedulers;

  auto add_common = [&](CLI::App* cmd, bool needs_seed) {
    cmd->add_option("--platform", a.platform, "platform config JSON or tx2-default");
    if (needs_seed) cmd->add_option("--seed", a.seed, "RNG seed")->required();
  };

  auto* profile = app.add_subcommand("profile", "synthetic-kernel oracle profile");
  add_common(profile, false);
  profile->add_option("--out", a.out, "output CSV")->required();

  auto* fit = app.add_subcommand("fit", "fit models from a profile CSV");
  add_common(fit, false);
  fit->add_option("--profile", profile_path, "profile CSV")->required();
  fit->add_option("--out", a.out, "coefficient JSON")->required();

  auto* run = app.add_subcommand("run", "run one scheduler on a workload");
  add_common(run, true);
  run->add_option("--workload", a.workload, "workload JSON")->required();
  run->add_option("--scheduler", a.scheduler, "scheduler kind")
      ->check(CLI::IsMember(scheduler_names()));
  run->add_option("--goal", a.goal, "min_energy | speedup:<x> | max_perf");
  run->add_option("--models", a.models_path, "pre-fitted coefficient JSON");
  run->add_option("--out", a.out, "output directory")->required();
  run->add_option("--trace", a.trace_path, "event trace output file");
  run->add_flag("--oracle-tables", a.oracle_tables,
                "use oracle-exact lookup tables");

  auto* compare = app.add_subcommand("compare", "run schedulers side by side");
  add_common(compare, true);
  compare->add_option("--workload", a.workload, "workload JSON")->required();
  compare->add_option("--schedulers", schedulers, "subset to compare")
      ->delimiter(',');
  compare->add_option("--goal", a.goal, "selection goal");
  compare->add_option("--models", a.models_path, "pre-fitted coefficient JSON");
  compare->add_option("--out", a.out, "output directory");
  compare->add_flag("--oracle-tables", a.oracle_tables,
                    "use oracle-exact lookup tables");

  auto* sweep = app.add_subcommand("sweep", "oracle energy grid for one kernel");
  add_common(sweep, false);
  sweep->add_option("--kernel", kernel, "kernel name")->required();
  sweep->add_option("--out", a.out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (profile->parsed()) return cmd_profile(a);
    if (fit->parsed()) return cmd_fit(a, profile_path);
    if (run->parsed()) return cmd_run(a);
    if (compare->parsed()) return cmd_compare(a, schedulers);
    if (sweep->parsed()) return cmd_sweep(a, kernel);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
