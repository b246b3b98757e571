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

#include "metrott/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "metrott/error.hpp"

namespace metrott {
namespace {

void check_name(const std::string& name) {
  if (name.empty()) raise(ErrorCode::kInvalidArgument, "empty name");
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      raise(ErrorCode::kInvalidArgument, "name contains whitespace: '" + name + "'");
    }
  }
}

}  // namespace

std::string_view Constraint::family() const {
  const auto dot = name.find('.');
  return dot == std::string::npos ? std::string_view{} : std::string_view(name).substr(0, dot);
}

int MilpInstance::add_variable(std::string name, VarKind kind, double lower, double upper) {
  check_name(name);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    raise(ErrorCode::kInvalidArgument, "invalid bounds for variable " + name);
  }
  if (kind == VarKind::kBinary && (lower < 0.0 || upper > 1.0)) {
    raise(ErrorCode::kInvalidArgument, "binary bounds must lie in [0, 1]: " + name);
  }
  const int index = num_variables();
  if (!index_.emplace(name, index).second) {
    raise(ErrorCode::kInvalidArgument, "duplicate variable " + name);
  }
  variables_.push_back(Variable{std::move(name), kind, lower, upper});
  return index;
}

std::optional<int> MilpInstance::find_variable(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int MilpInstance::variable_index(std::string_view name) const {
  const auto found = find_variable(name);
  if (!found) raise(ErrorCode::kInvalidArgument, "unknown variable " + std::string(name));
  return *found;
}

int MilpInstance::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) {
    return v.kind == VarKind::kBinary;
  }));
}

void MilpInstance::set_bounds(int index, double lower, double upper) {
  Variable& v = variables_.at(static_cast<std::size_t>(index));
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    raise(ErrorCode::kInvalidArgument, "invalid bounds for variable " + v.name);
  }
  v.lower = lower;
  v.upper = upper;
}

int MilpInstance::add_constraint(Constraint row) {
  check_name(row.name);
  if (!std::isfinite(row.rhs)) {
    raise(ErrorCode::kInvalidArgument, "non-finite right-hand side in " + row.name);
  }
  for (const Term& t : row.terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      raise(ErrorCode::kInvalidArgument, "row " + row.name + " references an undeclared variable");
    }
    if (!std::isfinite(t.coef)) {
      raise(ErrorCode::kInvalidArgument, "non-finite coefficient in " + row.name);
    }
  }
  std::sort(row.terms.begin(), row.terms.end(),
            [](const Term& l, const Term& r) { return l.var < r.var; });
  std::vector<Term> merged;
  merged.reserve(row.terms.size());
  for (const Term& t : row.terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  row.terms = std::move(merged);
  const int index = num_constraints();
  if (!row_index_.emplace(row.name, index).second) {
    raise(ErrorCode::kInvalidArgument, "duplicate constraint " + row.name);
  }
  constraints_.push_back(std::move(row));
  return index;
}

void MilpInstance::set_named_objective(const std::string& name, Objective objective) {
  for (const Term& t : objective.terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      raise(ErrorCode::kInvalidArgument, "objective " + name + " references an undeclared variable");
    }
  }
  named_objectives_[name] = std::move(objective);
}

std::map<std::string, int, std::less<>> MilpInstance::family_counts() const {
  std::map<std::string, int, std::less<>> counts;
  for (const Constraint& row : constraints_) ++counts[std::string(row.family())];
  return counts;
}

double MilpInstance::evaluate(const Objective& objective, std::span<const double> values) const {
  double total = objective.constant;
  for (const Term& t : objective.terms) total += t.coef * values[static_cast<std::size_t>(t.var)];
  return total;
}

double MilpInstance::activity(const Constraint& row, std::span<const double> values) const {
  double total = 0.0;
  for (const Term& t : row.terms) total += t.coef * values[static_cast<std::size_t>(t.var)];
  return total;
}

std::vector<RowViolation> MilpInstance::violations(std::span<const double> values, double tol) const {
  std::vector<RowViolation> out;
  if (values.size() != variables_.size()) {
    out.push_back({"<assignment size>", std::abs(static_cast<double>(values.size()) -
                                                 static_cast<double>(variables_.size()))});
    return out;
  }
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const Variable& v = variables_[j];
    const double x = values[j];
    const double excess = std::max(v.lower - x, x - v.upper);
    if (excess > tol) out.push_back({v.name, excess});
    if (v.kind == VarKind::kBinary) {
      const double frac = std::abs(x - std::round(x));
      if (frac > tol) out.push_back({v.name + "(integrality)", frac});
    }
  }
  for (const Constraint& row : constraints_) {
    const double lhs = activity(row, values);
    double excess = 0.0;
    switch (row.sense) {
      case RowSense::kLessEqual: excess = lhs - row.rhs; break;
      case RowSense::kGreaterEqual: excess = row.rhs - lhs; break;
      case RowSense::kEqual: excess = std::abs(lhs - row.rhs); break;
    }
    if (excess > tol) out.push_back({row.name, excess});
  }
  return out;
}

}  // namespace metrott
