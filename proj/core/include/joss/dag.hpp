#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace joss {

using TaskId = int;

struct TaskNode {
  TaskId id = 0;
  std::string kernel;
  std::vector<TaskId> preds;
};

/// A task graph. Nodes are stored in insertion order; ids are dense [0, size).
class TaskDAG {
 public:
  TaskId add_task(std::string kernel, std::vector<TaskId> preds = {});

  const std::vector<TaskNode>& tasks() const { return tasks_; }
  size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }
  const TaskNode& task(TaskId id) const { return tasks_.at(id); }

  /// Successor adjacency, built on demand.
  std::vector<std::vector<TaskId>> successors() const;

  /// Throws std::invalid_argument if a cycle or dangling edge exists.
  void validate() const;
  /// Topological order (also the cycle check).
  std::vector<TaskId> topo_order() const;

  /// Longest path length in tasks (critical path).
  int longest_path() const;
  /// dop = task_count / longest_path; 0 for an empty DAG.
  double dop() const;

  /// Distinct kernel names in first-appearance order.
  std::vector<std::string> kernel_names() const;
  /// Instance count per kernel.
  int kernel_instances(const std::string& kernel) const;

  // Line-oriented text format: "id kernel pred,pred,..." ("-" when no preds).
  void save(std::ostream& os) const;
  static TaskDAG load(std::istream& is);

 private:
  std::vector<TaskNode> tasks_;
};

/// dop independent chains of n_tasks/dop tasks each, all of one kernel.
/// Throws if dop does not divide n_tasks.
TaskDAG gen_chain(const std::string& kernel, int n_tasks, int dop);

struct SparseLuKernels {
  std::string lu0 = "lu0";
  std::string fwd = "fwd";
  std::string bdiv = "bdiv";
  std::string bmod = "bmod";
};

/// Blocked-LU dependency structure over a blocks x blocks grid.
TaskDAG gen_sparselu(int blocks, const SparseLuKernels& kernels = {});

/// Alternating fork/join layers; each join depends on the whole previous layer.
TaskDAG gen_forkjoin(const std::string& fork_kernel, const std::string& join_kernel,
                     int width, int layers);

/// Seeded random layered DAG drawing kernels uniformly from the pool.
TaskDAG gen_mixed(std::uint64_t seed, const std::vector<std::string>& kernel_pool,
                  int n_tasks);

}  // namespace joss
