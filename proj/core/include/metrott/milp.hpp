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

#ifndef METROTT_MILP_HPP_
#define METROTT_MILP_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace metrott {

enum class VarKind { kContinuous, kBinary };
enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class ObjSense { kMinimize, kMaximize };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;
};

// Row names follow "<family>.<rule>[idx]..." so the family tag survives an
// MPS round trip.
struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;

  std::string_view family() const;
};

struct Objective {
  ObjSense sense = ObjSense::kMinimize;
  std::vector<Term> terms;
  double constant = 0.0;
};

struct RowViolation {
  std::string what;  // row or variable name
  double amount = 0.0;
};

// Generic mixed-binary linear program: the target of the model builders, the
// input of the solver and the unit of MPS exchange.
class MilpInstance {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  std::optional<int> find_variable(std::string_view name) const;
  // Throws InvalidArgument when the name is unknown.
  int variable_index(std::string_view name) const;
  const Variable& variable(int index) const { return variables_.at(static_cast<std::size_t>(index)); }
  const std::vector<Variable>& variables() const { return variables_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_binaries() const;
  void set_bounds(int index, double lower, double upper);

  int add_constraint(Constraint row);
  const std::vector<Constraint>& constraints() const { return constraints_; }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

  void set_objective(Objective objective) { objective_ = std::move(objective); }
  const Objective& objective() const { return objective_; }

  // Additional objectives kept for multi-objective drivers (name -> row).
  void set_named_objective(const std::string& name, Objective objective);
  const std::map<std::string, Objective>& named_objectives() const { return named_objectives_; }

  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  std::map<std::string, int, std::less<>> family_counts() const;

  double evaluate(const Objective& objective, std::span<const double> values) const;
  double activity(const Constraint& row, std::span<const double> values) const;

  // Bound, integrality and row violations larger than tol (absolute).
  std::vector<RowViolation> violations(std::span<const double> values, double tol) const;

 private:
  std::vector<Variable> variables_;
  std::unordered_map<std::string, int> index_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> row_index_;
  Objective objective_;
  std::map<std::string, Objective> named_objectives_;
  std::map<std::string, std::string> metadata_;
};

}  // namespace metrott

#endif  // METROTT_MILP_HPP_
