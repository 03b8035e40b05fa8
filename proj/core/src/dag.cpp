#include "joss/dag.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace joss {

TaskId TaskDAG::add_task(std::string kernel, std::vector<TaskId> preds) {
  TaskId id = static_cast<TaskId>(tasks_.size());
  for (TaskId p : preds) {
    if (p < 0 || p >= id)
      throw std::invalid_argument("dag: edge to nonexistent or later task " +
                                  std::to_string(p));
  }
  tasks_.push_back({id, std::move(kernel), std::move(preds)});
  return id;
}

std::vector<std::vector<TaskId>> TaskDAG::successors() const {
  std::vector<std::vector<TaskId>> succ(tasks_.size());
  for (const auto& t : tasks_)
    for (TaskId p : t.preds) succ[p].push_back(t.id);
  return succ;
}

std::vector<TaskId> TaskDAG::topo_order() const {
  std::vector<int> indeg(tasks_.size(), 0);
  auto succ = successors();
  for (const auto& t : tasks_) indeg[t.id] = static_cast<int>(t.preds.size());
  std::deque<TaskId> ready;
  for (const auto& t : tasks_)
    if (indeg[t.id] == 0) ready.push_back(t.id);
  std::vector<TaskId> order;
  order.reserve(tasks_.size());
  while (!ready.empty()) {
    TaskId t = ready.front();
    ready.pop_front();
    order.push_back(t);
    for (TaskId s : succ[t])
      if (--indeg[s] == 0) ready.push_back(s);
  }
  if (order.size() != tasks_.size())
    throw std::invalid_argument("dag: cycle detected");
  return order;
}

void TaskDAG::validate() const { (void)topo_order(); }

int TaskDAG::longest_path() const {
  if (tasks_.empty()) return 0;
  auto order = topo_order();
  std::vector<int> depth(tasks_.size(), 1);
  for (TaskId t : order)
    for (TaskId p : tasks_[t].preds) depth[t] = std::max(depth[t], depth[p] + 1);
  return *std::max_element(depth.begin(), depth.end());
}

double TaskDAG::dop() const {
  if (tasks_.empty()) return 0.0;
  return static_cast<double>(tasks_.size()) / longest_path();
}

std::vector<std::string> TaskDAG::kernel_names() const {
  std::vector<std::string> names;
  for (const auto& t : tasks_)
    if (std::find(names.begin(), names.end(), t.kernel) == names.end())
      names.push_back(t.kernel);
  return names;
}

int TaskDAG::kernel_instances(const std::string& kernel) const {
  int n = 0;
  for (const auto& t : tasks_)
    if (t.kernel == kernel) ++n;
  return n;
}

void TaskDAG::save(std::ostream& os) const {
  for (const auto& t : tasks_) {
    os << t.id << ' ' << t.kernel << ' ';
    if (t.preds.empty()) {
      os << '-';
    } else {
      for (size_t i = 0; i < t.preds.size(); ++i) {
        if (i) os << ',';
        os << t.preds[i];
      }
    }
    os << '\n';
  }
}

TaskDAG TaskDAG::load(std::istream& is) {
  TaskDAG dag;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    TaskId id;
    std::string kernel, preds_field;
    if (!(ls >> id >> kernel >> preds_field))
      throw std::invalid_argument("dag: malformed line: " + line);
    if (id != static_cast<TaskId>(dag.size()))
      throw std::invalid_argument("dag: ids must be dense and in order");
    std::vector<TaskId> preds;
    if (preds_field != "-") {
      std::istringstream ps(preds_field);
      std::string tok;
      while (std::getline(ps, tok, ',')) preds.push_back(std::stoi(tok));
    }
    dag.add_task(kernel, std::move(preds));
  }
  return dag;
}

TaskDAG gen_chain(const std::string& kernel, int n_tasks, int dop) {
  if (n_tasks < 1 || dop < 1) throw std::invalid_argument("gen_chain: n_tasks and dop must be >= 1");
  if (n_tasks % dop != 0)
    throw std::invalid_argument("gen_chain: dop must divide n_tasks evenly");
  TaskDAG dag;
  int per_chain = n_tasks / dop;
  for (int c = 0; c < dop; ++c) {
    TaskId prev = -1;
    for (int i = 0; i < per_chain; ++i) {
      prev = dag.add_task(kernel, prev < 0 ? std::vector<TaskId>{}
                                           : std::vector<TaskId>{prev});
    }
  }
  return dag;
}

TaskDAG gen_sparselu(int blocks, const SparseLuKernels& kernels) {
  if (blocks < 2) throw std::invalid_argument("gen_sparselu: blocks must be >= 2");
  const int B = blocks;
  // Initial sparsity pattern in the style of the BOTS SparseLU input; fill-in
  // appears wherever a bmod update writes an empty block.
  std::vector<std::vector<bool>> present(B, std::vector<bool>(B, false));
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < B; ++j) {
      bool null_entry = false;
      if (i < j && i % 3 != 0) null_entry = true;
      if (i > j && j % 3 != 0) null_entry = true;
      if (i % 2 == 1) null_entry = true;
      if (j % 2 == 1) null_entry = true;
      if (i == j || i == j - 1 || i - 1 == j) null_entry = false;
      present[i][j] = !null_entry;
    }
  }
  TaskDAG dag;
  // last_writer[i][j]: task that most recently produced block (i,j); -1 if none.
  std::vector<std::vector<TaskId>> last(B, std::vector<TaskId>(B, -1));
  auto deps_of = [&](std::initializer_list<TaskId> ids) {
    std::vector<TaskId> d;
    for (TaskId t : ids)
      if (t >= 0 && std::find(d.begin(), d.end(), t) == d.end()) d.push_back(t);
    return d;
  };
  for (int k = 0; k < B; ++k) {
    TaskId lu0 = dag.add_task(kernels.lu0, deps_of({last[k][k]}));
    last[k][k] = lu0;
    for (int j = k + 1; j < B; ++j) {
      if (!present[k][j]) continue;
      last[k][j] = dag.add_task(kernels.fwd, deps_of({lu0, last[k][j]}));
    }
    for (int i = k + 1; i < B; ++i) {
      if (!present[i][k]) continue;
      last[i][k] = dag.add_task(kernels.bdiv, deps_of({lu0, last[i][k]}));
    }
    for (int i = k + 1; i < B; ++i) {
      if (!present[i][k]) continue;
      for (int j = k + 1; j < B; ++j) {
        if (!present[k][j]) continue;
        last[i][j] = dag.add_task(kernels.bmod,
                                  deps_of({last[i][k], last[k][j], last[i][j]}));
        present[i][j] = true;
      }
    }
  }
  return dag;
}

TaskDAG gen_forkjoin(const std::string& fork_kernel, const std::string& join_kernel,
                     int width, int layers) {
  if (layers < 1 || width < 1)
    throw std::invalid_argument("gen_forkjoin: layers and width must be >= 1");
  TaskDAG dag;
  // Even layers fork: node w continues from node w of the layer below.
  // Odd layers join: every node depends on the whole previous layer.
  std::vector<TaskId> prev_layer;
  for (int l = 0; l < layers; ++l) {
    bool join_layer = (l % 2 == 1);
    std::vector<TaskId> layer;
    for (int w = 0; w < width; ++w) {
      std::vector<TaskId> preds;
      if (!prev_layer.empty())
        preds = join_layer ? prev_layer : std::vector<TaskId>{prev_layer[w]};
      layer.push_back(
          dag.add_task(join_layer ? join_kernel : fork_kernel, std::move(preds)));
    }
    prev_layer = std::move(layer);
  }
  return dag;
}

TaskDAG gen_mixed(std::uint64_t seed, const std::vector<std::string>& kernel_pool,
                  int n_tasks) {
  if (kernel_pool.empty()) throw std::invalid_argument("gen_mixed: empty kernel pool");
  if (n_tasks < 1) throw std::invalid_argument("gen_mixed: n_tasks must be >= 1");
  std::mt19937_64 rng(seed);
  TaskDAG dag;
  std::vector<TaskId> prev_layer;
  int remaining = n_tasks;
  std::uniform_int_distribution<int> width_dist(1, 16);
  std::uniform_int_distribution<size_t> kdist(0, kernel_pool.size() - 1);
  while (remaining > 0) {
    int width = std::min(remaining, width_dist(rng));
    std::vector<TaskId> layer;
    for (int w = 0; w < width; ++w) {
      std::vector<TaskId> preds;
      if (!prev_layer.empty()) {
        // each node depends on 1..3 random nodes of the previous layer
        std::uniform_int_distribution<int> ndeps(1, 3);
        int k = std::min<int>(ndeps(rng), static_cast<int>(prev_layer.size()));
        std::vector<TaskId> pool = prev_layer;
        std::shuffle(pool.begin(), pool.end(), rng);
        preds.assign(pool.begin(), pool.begin() + k);
        std::sort(preds.begin(), preds.end());
      }
      layer.push_back(dag.add_task(kernel_pool[kdist(rng)], std::move(preds)));
    }
    prev_layer = std::move(layer);
    remaining -= width;
  }
  return dag;
}

}  // namespace joss
