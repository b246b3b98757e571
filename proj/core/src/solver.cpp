// Copyright 2026 The metrott Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metrott/solver.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "metrott/error.hpp"
#include "metrott/lp.hpp"

namespace metrott {
namespace {

using Clock = std::chrono::steady_clock;
using BasisPtr = std::shared_ptr<const std::vector<BasisStatus>>;

struct Node {
  std::vector<std::pair<int, double>> fixings;
  BasisPtr basis;
  double bound = -std::numeric_limits<double>::infinity();  // minimization sense
  int depth = 0;
  long id = 0;
};

struct NodeResult {
  LpStatus status = LpStatus::kInfeasible;
  bool failed = false;
  double z = 0.0;
  std::vector<double> values;
  BasisPtr basis;
  long iterations = 0;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool objective_is_integral(const MilpInstance& instance) {
  const Objective& obj = instance.objective();
  if (obj.constant != std::round(obj.constant)) return false;
  for (const Term& t : obj.terms) {
    if (instance.variable(t.var).kind != VarKind::kBinary) return false;
    if (t.coef != std::round(t.coef)) return false;
  }
  return true;
}

// Snaps binaries to 0/1 and continuous values into their bounds.
void snap(const MilpInstance& instance, std::vector<double>& values) {
  for (int j = 0; j < instance.num_variables(); ++j) {
    const Variable& v = instance.variable(j);
    double& x = values[static_cast<std::size_t>(j)];
    if (v.kind == VarKind::kBinary) x = std::round(x);
    x = std::clamp(x, v.lower, v.upper);
  }
}

// Fixes every binary to its rounded value and re-optimizes the rest.
std::optional<std::vector<double>> polish(const MilpInstance& instance, DualSimplex& lp,
                                          const std::vector<int>& binaries,
                                          const std::vector<double>& values, const BasisPtr& basis,
                                          double tolerance, LpOptions options, long& iterations) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    lp.reset_bounds();
    for (int j : binaries) {
      const double r = std::clamp(std::round(values[static_cast<std::size_t>(j)]), 0.0, 1.0);
      const Variable& v = instance.variable(j);
      if (r < v.lower || r > v.upper) return std::nullopt;
      lp.set_bounds(j, r, r);
    }
    if (attempt == 0 && basis) {
      lp.set_basis(*basis);
    } else {
      lp.set_basis({});
    }
    options.cutoff = std::numeric_limits<double>::infinity();
    const LpResult res = lp.solve(options);
    iterations += res.iterations;
    if (res.status != LpStatus::kOptimal) return std::nullopt;
    std::vector<double> out = res.values;
    snap(instance, out);
    if (instance.violations(out, tolerance).empty()) return out;
  }
  return std::nullopt;
}

class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& instance, const SolverOptions& options)
      : instance_(instance), options_(options), base_(instance) {
    sign_ = instance.objective().sense == ObjSense::kMaximize ? -1.0 : 1.0;
    for (int j = 0; j < instance.num_variables(); ++j) {
      if (instance.variable(j).kind == VarKind::kBinary) binaries_.push_back(j);
    }
    std::vector<int> order(static_cast<std::size_t>(instance.num_variables()));
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return instance.variable(a).name < instance.variable(b).name;
    });
    name_rank_.assign(order.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) name_rank_[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
    integral_ = objective_is_integral(instance);
  }

  MilpSolution run() {
    const auto start = Clock::now();
    deadline_ = start + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(options_.time_limit));
    lp_options_.deadline = deadline_;

    DualSimplex polisher(base_);
    if (options_.initial_solution &&
        options_.initial_solution->size() == static_cast<std::size_t>(instance_.num_variables())) {
      auto start_values =
          polish(instance_, polisher, binaries_, *options_.initial_solution, nullptr,
                 options_.feasibility_tolerance, lp_options_, iterations_);
      if (start_values) offer(std::move(*start_values));
    }

    if (!incumbent_ && !binaries_.empty()) {
      if (auto found = dive(polisher)) offer(std::move(*found));
    }

    const int threads = std::max(1, options_.threads);
    std::vector<DualSimplex> workers(static_cast<std::size_t>(std::min(threads, options_.batch_size)), base_);
    std::vector<Node> open;
    open.push_back(Node{});
    long next_id = 1;
    bool stopped = false;
    bool incomplete = false;

    while (!open.empty()) {
      if (Clock::now() > deadline_ || nodes_ >= options_.node_limit) {
        stopped = true;
        break;
      }
      const double cutoff = node_cutoff();
      std::vector<Node> batch;
      while (!open.empty() && static_cast<int>(batch.size()) < options_.batch_size &&
             nodes_ + static_cast<long>(batch.size()) < options_.node_limit) {
        Node node = take(open);
        if (incumbent_ && node.bound > cutoff) continue;
        batch.push_back(std::move(node));
      }
      if (batch.empty()) continue;

      std::vector<NodeResult> results(batch.size());
      auto work = [&](std::size_t slot) {
        for (std::size_t i = slot; i < batch.size(); i += workers.size()) {
          results[i] = solve_node(workers[slot], batch[i], cutoff);
        }
      };
      if (workers.size() == 1 || batch.size() == 1) {
        work(0);
        for (std::size_t slot = 1; slot < workers.size(); ++slot) {
          for (std::size_t i = slot; i < batch.size(); i += workers.size()) {
            results[i] = solve_node(workers[0], batch[i], cutoff);
          }
        }
      } else {
        std::vector<std::thread> pool;
        for (std::size_t slot = 0; slot < workers.size(); ++slot) pool.emplace_back(work, slot);
        for (std::thread& t : pool) t.join();
      }

      for (std::size_t i = 0; i < batch.size(); ++i) {
        Node& node = batch[i];
        NodeResult& res = results[i];
        iterations_ += res.iterations;
        if (res.status == LpStatus::kTimeLimit) {
          open.push_back(std::move(node));
          stopped = true;
          continue;
        }
        ++nodes_;
        if (res.failed) {
          incomplete = true;
          continue;
        }
        if (res.status != LpStatus::kOptimal) continue;
        if (incumbent_ && res.z > node_cutoff()) continue;

        const int branch = choose_branch(res.values);
        if (branch < 0) {
          std::vector<double> values = res.values;
          snap(instance_, values);
          if (instance_.violations(values, options_.feasibility_tolerance).empty()) {
            offer(std::move(values));
          } else if (auto fixed = polish(instance_, polisher, binaries_, res.values, res.basis,
                                         options_.feasibility_tolerance, lp_options_, iterations_)) {
            offer(std::move(*fixed));
          }
          continue;
        }
        const double frac = res.values[static_cast<std::size_t>(branch)];
        const double preferred = frac >= 0.5 ? 1.0 : 0.0;
        for (double value : {1.0 - preferred, preferred}) {
          Node child;
          child.fixings = node.fixings;
          child.fixings.emplace_back(branch, value);
          child.basis = res.basis;
          child.bound = res.z;
          child.depth = node.depth + 1;
          child.id = next_id++;
          open.push_back(std::move(child));
        }
      }
      if (stopped) break;
    }

    MilpSolution out;
    out.nodes = nodes_;
    out.lp_iterations = iterations_;
    double bound = incumbent_ ? incumbent_z_ : std::numeric_limits<double>::infinity();
    for (const Node& node : open) bound = std::min(bound, node.bound);
    if (incumbent_) {
      out.values = *incumbent_;
      out.objective = instance_.evaluate(instance_.objective(), out.values);
    }
    if (stopped) {
      out.status = Clock::now() > deadline_ ? SolveStatus::kTimeLimit
                                            : (incumbent_ ? SolveStatus::kFeasible : SolveStatus::kTimeLimit);
    } else if (incomplete) {
      out.status = incumbent_ ? SolveStatus::kFeasible : SolveStatus::kTimeLimit;
    } else {
      out.status = incumbent_ ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
      bound = incumbent_ ? incumbent_z_ : bound;
    }
    if (std::isfinite(bound)) {
      out.bound = sign_ * bound;
    } else {
      out.bound = out.status == SolveStatus::kInfeasible ? sign_ * std::numeric_limits<double>::infinity()
                                                         : -sign_ * std::numeric_limits<double>::infinity();
    }
    if (out.status == SolveStatus::kOptimal) out.bound = out.objective;
    out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  }

 private:
  double node_cutoff() const {
    if (!incumbent_) return std::numeric_limits<double>::infinity();
    if (integral_) return incumbent_z_ - 1.0 + 1e-6;
    return incumbent_z_ - options_.absolute_gap;
  }

  // Depth-first until an incumbent exists, best-bound afterwards.
  Node take(std::vector<Node>& open) const {
    std::size_t pick = open.size() - 1;
    if (incumbent_) {
      for (std::size_t i = 0; i < open.size(); ++i) {
        const Node& a = open[i];
        const Node& b = open[pick];
        if (a.bound < b.bound || (a.bound == b.bound && a.id < b.id)) pick = i;
      }
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    return node;
  }

  NodeResult solve_node(DualSimplex& lp, const Node& node, double cutoff) const {
    NodeResult out;
    try {
      lp.reset_bounds();
      for (const auto& [var, value] : node.fixings) lp.set_bounds(var, value, value);
      lp.set_basis(node.basis ? *node.basis : std::vector<BasisStatus>{});
      LpOptions opts = lp_options_;
      opts.cutoff = cutoff;
      const LpResult res = lp.solve(opts);
      out.status = res.status;
      out.iterations = res.iterations;
      out.z = sign_ * res.objective;
      if (res.status == LpStatus::kIterationLimit) out.failed = true;
      if (res.status == LpStatus::kOptimal) {
        out.values = res.values;
        out.basis = std::make_shared<const std::vector<BasisStatus>>(lp.basis());
      }
    } catch (const Error&) {
      out.failed = true;
    }
    return out;
  }

  // Fractional diving: rounds the least fractional binaries of the LP
  // optimum in shrinking batches, falling back to a single rounding and then
  // to its opposite value when a batch makes the LP infeasible.
  std::optional<std::vector<double>> dive(DualSimplex& lp) {
    lp.reset_bounds();
    lp.set_basis({});
    const LpOptions opts = lp_options_;
    LpResult res = lp.solve(opts);
    iterations_ += res.iterations;
    std::vector<std::pair<double, int>> fractional;
    auto resolve = [&](const std::vector<BasisStatus>& basis) {
      lp.set_basis(basis);
      res = lp.solve(opts);
      iterations_ += res.iterations;
      return res.status == LpStatus::kOptimal;
    };
    while (res.status == LpStatus::kOptimal && Clock::now() < deadline_) {
      fractional.clear();
      for (int j : binaries_) {
        const double x = res.values[static_cast<std::size_t>(j)];
        const double frac = std::abs(x - std::round(x));
        if (frac > options_.integrality_tolerance) fractional.emplace_back(frac, j);
      }
      if (fractional.empty()) {
        std::vector<double> values = res.values;
        snap(instance_, values);
        if (instance_.violations(values, options_.feasibility_tolerance).empty()) return values;
        return polish(instance_, lp, binaries_, res.values, nullptr, options_.feasibility_tolerance,
                      lp_options_, iterations_);
      }
      std::sort(fractional.begin(), fractional.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return name_rank_[static_cast<std::size_t>(a.second)] < name_rank_[static_cast<std::size_t>(b.second)];
      });
      const std::vector<double> values = res.values;
      const std::vector<BasisStatus> basis = lp.basis();
      auto rounded = [&](int j) { return std::round(values[static_cast<std::size_t>(j)]); };
      const std::size_t batch = std::max<std::size_t>(1, fractional.size() / 8);
      for (std::size_t k = 0; k < batch; ++k) {
        const int j = fractional[k].second;
        lp.set_bounds(j, rounded(j), rounded(j));
      }
      if (resolve(basis) || res.status == LpStatus::kTimeLimit) continue;
      for (std::size_t k = 1; k < batch; ++k) {
        const Variable& v = instance_.variable(fractional[k].second);
        lp.set_bounds(fractional[k].second, v.lower, v.upper);
      }
      const int pick = fractional.front().second;
      if (batch > 1 && resolve(basis)) continue;
      lp.set_bounds(pick, 1.0 - rounded(pick), 1.0 - rounded(pick));
      resolve(basis);
    }
    return std::nullopt;
  }

  int choose_branch(const std::vector<double>& values) const {
    int best = -1;
    double best_score = 0.0;
    for (int j : binaries_) {
      const double x = values[static_cast<std::size_t>(j)];
      const double frac = std::abs(x - std::round(x));
      if (frac <= options_.integrality_tolerance) continue;
      if (options_.branching == BranchingRule::kFirstIndex) return j;
      const double score = frac;
      if (best < 0 || score > best_score + 1e-12 ||
          (score >= best_score - 1e-12 && name_rank_[static_cast<std::size_t>(j)] < name_rank_[static_cast<std::size_t>(best)])) {
        best = j;
        best_score = score;
      }
    }
    return best;
  }

  void offer(std::vector<double> values) {
    const double z = sign_ * instance_.evaluate(instance_.objective(), values);
    if (!incumbent_ || z < incumbent_z_ - 1e-9 * (1.0 + std::abs(z))) {
      incumbent_ = std::move(values);
      incumbent_z_ = z;
    }
  }

  const MilpInstance& instance_;
  const SolverOptions& options_;
  DualSimplex base_;
  LpOptions lp_options_;
  Clock::time_point deadline_;
  double sign_ = 1.0;
  bool integral_ = false;
  std::vector<int> binaries_;
  std::vector<int> name_rank_;
  std::optional<std::vector<double>> incumbent_;
  double incumbent_z_ = std::numeric_limits<double>::infinity();
  long nodes_ = 0;
  long iterations_ = 0;
};

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeLimit: return "time_limit";
  }
  return "optimal";
}

std::string to_string(BranchingRule rule) {
  return rule == BranchingRule::kMostFractional ? "most-fractional" : "first-index";
}

std::optional<BranchingRule> parse_branching_rule(std::string_view text) {
  if (text == "most-fractional") return BranchingRule::kMostFractional;
  if (text == "first-index") return BranchingRule::kFirstIndex;
  return std::nullopt;
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return 0;
    case SolveStatus::kInfeasible: return 2;
    default: return 3;
  }
}

void SolverOptions::validate() const {
  if (!(time_limit > 0.0)) raise(ErrorCode::kInvalidArgument, "time_limit must be positive");
  if (!(absolute_gap >= 0.0)) raise(ErrorCode::kInvalidArgument, "absolute_gap must be non-negative");
  if (node_limit < 1) raise(ErrorCode::kInvalidArgument, "node_limit must be at least 1");
  if (threads < 1) raise(ErrorCode::kInvalidArgument, "threads must be at least 1");
  if (batch_size < 1) raise(ErrorCode::kInvalidArgument, "batch_size must be at least 1");
}

double MilpSolution::value(const MilpInstance& instance, std::string_view name) const {
  if (values.empty()) raise(ErrorCode::kInvalidArgument, "solution has no assignment");
  return values.at(static_cast<std::size_t>(instance.variable_index(name)));
}

MilpSolution solve(const MilpInstance& instance, const SolverOptions& options) {
  options.validate();
  BranchAndBound bnb(instance, options);
  return bnb.run();
}

std::optional<std::vector<double>> complete_assignment(const MilpInstance& instance,
                                                       const std::vector<double>& values,
                                                       double tolerance) {
  if (values.size() != static_cast<std::size_t>(instance.num_variables())) {
    raise(ErrorCode::kInvalidArgument, "assignment size does not match the instance");
  }
  std::vector<int> binaries;
  for (int j = 0; j < instance.num_variables(); ++j) {
    if (instance.variable(j).kind == VarKind::kBinary) binaries.push_back(j);
  }
  DualSimplex lp(instance);
  long iterations = 0;
  return polish(instance, lp, binaries, values, nullptr, tolerance, LpOptions{}, iterations);
}

void write_solution(std::ostream& out, const MilpInstance& instance, const MilpSolution& solution) {
  out << "# status " << to_string(solution.status) << '\n';
  if (solution.has_solution()) out << "# objective " << format_double(solution.objective) << '\n';
  out << "# bound " << format_double(solution.bound) << '\n';
  for (std::size_t j = 0; j < solution.values.size(); ++j) {
    out << instance.variable(static_cast<int>(j)).name << ' ' << format_double(solution.values[j]) << '\n';
  }
}

std::vector<double> read_solution(std::istream& in, const MilpInstance& instance) {
  std::vector<double> values(static_cast<std::size_t>(instance.num_variables()), 0.0);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name;
    std::string number;
    if (!(fields >> name >> number)) {
      raise(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected 'name value'");
    }
    const auto index = instance.find_variable(name);
    if (!index) raise(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": unknown variable " + name);
    double v = 0.0;
    const auto res = std::from_chars(number.data(), number.data() + number.size(), v);
    if (res.ec != std::errc{} || res.ptr != number.data() + number.size()) {
      raise(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad number '" + number + "'");
    }
    values[static_cast<std::size_t>(*index)] = v;
  }
  return values;
}

}  // namespace metrott
