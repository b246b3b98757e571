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


#include "metrott/lp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "basis_factor.hpp"
#include "metrott/error.hpp"

namespace metrott {
namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kDropTolerance = 1e-14;
constexpr int kScalingPasses = 8;
constexpr int kTroubleLimit = 200;

double power_of_two(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

struct Candidate {
  int j;
  double ratio;
  double relaxed;
  double size;
};

}  // namespace

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kCutoff: return "cutoff";
    case LpStatus::kIterationLimit: return "iteration_limit";
    case LpStatus::kTimeLimit: return "time_limit";
  }
  return "optimal";
}

struct DualSimplex::Impl {
  int n = 0;
  int m = 0;
  // Scaled structural matrix, column and row major.
  std::vector<int> col_start;
  std::vector<int> col_row;
  std::vector<double> col_val;
  std::vector<int> row_start;
  std::vector<int> row_col;
  std::vector<double> row_val;
  std::vector<double> row_scale;
  std::vector<double> col_scale;

  double sign = 1.0;  // internal objective = sign * (c x + constant)
  double constant = 0.0;
  std::vector<double> cost;  // n + m, scaled, minimization
  std::vector<double> work_cost;  // cost with the perturbation in force
  std::vector<double> root_lo;
  std::vector<double> root_up;
  std::vector<double> lo;
  std::vector<double> up;

  std::vector<BasisStatus> status;
  std::vector<int> head;
  std::vector<int> pos;
  std::vector<double> x;
  std::vector<double> dj;
  std::vector<double> weight;

  detail::BasisFactor factor;

  Impl(const MilpInstance& instance, const Objective& objective);
  Impl(const Impl& other) = default;

  bool fixed(int j) const { return up[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)] <= 0.0; }
  double at_bound(int j) const {
    return status[static_cast<std::size_t>(j)] == BasisStatus::kAtUpper ? up[static_cast<std::size_t>(j)]
                                                                        : lo[static_cast<std::size_t>(j)];
  }

  void slack_basis();
  bool factorize();
  void add_column(int j, double scale, std::vector<double>& v) const;
  double dot_column(int j, const std::vector<double>& y) const;
  void compute_primal();
  void compute_duals();
  int flip_dual_infeasible(double tol);
  void rebuild(double dual_tol);
  double perturb();
  double internal_objective() const;
  double working_objective() const;
  LpResult finish(LpStatus status, long iterations) const;
  LpResult solve(const LpOptions& options);
};

DualSimplex::Impl::Impl(const MilpInstance& instance, const Objective& objective) {
  n = instance.num_variables();
  m = instance.num_constraints();
  const auto& rows = instance.constraints();
  const auto& vars = instance.variables();
  for (const Variable& v : vars) {
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) {
      raise(ErrorCode::kNumericalFailure, "variable " + v.name + " needs finite bounds for the LP");
    }
  }

  // Column-major copy of A (unscaled first).
  std::vector<int> count(static_cast<std::size_t>(n) + 1, 0);
  for (const Constraint& row : rows) {
    for (const Term& t : row.terms) ++count[static_cast<std::size_t>(t.var) + 1];
  }
  col_start.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j) col_start[static_cast<std::size_t>(j) + 1] = col_start[static_cast<std::size_t>(j)] + count[static_cast<std::size_t>(j) + 1];
  const int nnz = col_start[static_cast<std::size_t>(n)];
  col_row.assign(static_cast<std::size_t>(nnz), 0);
  col_val.assign(static_cast<std::size_t>(nnz), 0.0);
  {
    std::vector<int> fill(col_start.begin(), col_start.end() - 1);
    for (int i = 0; i < m; ++i) {
      for (const Term& t : rows[static_cast<std::size_t>(i)].terms) {
        const int at = fill[static_cast<std::size_t>(t.var)]++;
        col_row[static_cast<std::size_t>(at)] = i;
        col_val[static_cast<std::size_t>(at)] = t.coef;
      }
    }
  }

  // Geometric scaling, rounded to powers of two.
  row_scale.assign(static_cast<std::size_t>(m), 1.0);
  col_scale.assign(static_cast<std::size_t>(n), 1.0);
  for (int pass = 0; pass < kScalingPasses; ++pass) {
    std::vector<double> rmin(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    std::vector<double> rmax(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < n; ++j) {
      for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
        const auto i = static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)]);
        const double a = std::abs(col_val[static_cast<std::size_t>(k)]) * col_scale[static_cast<std::size_t>(j)];
        rmin[i] = std::min(rmin[i], a);
        rmax[i] = std::max(rmax[i], a);
      }
    }
    for (int i = 0; i < m; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (rmax[ui] > 0.0) row_scale[ui] = 1.0 / std::sqrt(rmin[ui] * rmax[ui]);
    }
    for (int j = 0; j < n; ++j) {
      double cmin = std::numeric_limits<double>::infinity();
      double cmax = 0.0;
      for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
        const double a = std::abs(col_val[static_cast<std::size_t>(k)]) *
                         row_scale[static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)])];
        cmin = std::min(cmin, a);
        cmax = std::max(cmax, a);
      }
      if (cmax > 0.0) col_scale[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(cmin * cmax);
    }
  }
  for (double& s : row_scale) s = power_of_two(s);
  for (double& s : col_scale) s = power_of_two(s);

  // Implied row activity ranges from the original column bounds.
  std::vector<double> act_lo(static_cast<std::size_t>(m), 0.0);
  std::vector<double> act_hi(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < n; ++j) {
    const Variable& v = vars[static_cast<std::size_t>(j)];
    for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
      const auto i = static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)]);
      const double a = col_val[static_cast<std::size_t>(k)];
      act_lo[i] += std::min(a * v.lower, a * v.upper);
      act_hi[i] += std::max(a * v.lower, a * v.upper);
    }
  }

  for (int j = 0; j < n; ++j) {
    for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
      col_val[static_cast<std::size_t>(k)] *=
          row_scale[static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)])] * col_scale[static_cast<std::size_t>(j)];
    }
  }

  // Row-major copy of the scaled matrix.
  row_start.assign(static_cast<std::size_t>(m) + 1, 0);
  for (int k = 0; k < nnz; ++k) ++row_start[static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)]) + 1];
  for (int i = 0; i < m; ++i) row_start[static_cast<std::size_t>(i) + 1] += row_start[static_cast<std::size_t>(i)];
  row_col.assign(static_cast<std::size_t>(nnz), 0);
  row_val.assign(static_cast<std::size_t>(nnz), 0.0);
  {
    std::vector<int> fill(row_start.begin(), row_start.end() - 1);
    for (int j = 0; j < n; ++j) {
      for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
        const int at = fill[static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)])]++;
        row_col[static_cast<std::size_t>(at)] = j;
        row_val[static_cast<std::size_t>(at)] = col_val[static_cast<std::size_t>(k)];
      }
    }
  }

  const std::size_t total = static_cast<std::size_t>(n + m);
  sign = objective.sense == ObjSense::kMaximize ? -1.0 : 1.0;
  constant = objective.constant;
  cost.assign(total, 0.0);
  for (const Term& t : objective.terms) {
    cost[static_cast<std::size_t>(t.var)] += sign * t.coef * col_scale[static_cast<std::size_t>(t.var)];
  }
  root_lo.assign(total, 0.0);
  root_up.assign(total, 0.0);
  for (int j = 0; j < n; ++j) {
    const Variable& v = vars[static_cast<std::size_t>(j)];
    root_lo[static_cast<std::size_t>(j)] = v.lower / col_scale[static_cast<std::size_t>(j)];
    root_up[static_cast<std::size_t>(j)] = v.upper / col_scale[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < m; ++i) {
    const Constraint& row = rows[static_cast<std::size_t>(i)];
    const auto ui = static_cast<std::size_t>(i);
    double l = 0.0;
    double u = 0.0;
    switch (row.sense) {
      case RowSense::kLessEqual:
        l = std::min(act_lo[ui], row.rhs);
        u = row.rhs;
        break;
      case RowSense::kGreaterEqual:
        l = row.rhs;
        u = std::max(act_hi[ui], row.rhs);
        break;
      case RowSense::kEqual:
        l = u = row.rhs;
        break;
    }
    root_lo[static_cast<std::size_t>(n) + ui] = l * row_scale[ui];
    root_up[static_cast<std::size_t>(n) + ui] = u * row_scale[ui];
  }
  lo = root_lo;
  up = root_up;
  x.assign(total, 0.0);
  dj.assign(total, 0.0);
  slack_basis();
}

void DualSimplex::Impl::slack_basis() {
  const std::size_t total = static_cast<std::size_t>(n + m);
  status.assign(total, BasisStatus::kAtLower);
  pos.assign(total, -1);
  head.assign(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < n; ++j) {
    status[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)] < 0.0 ? BasisStatus::kAtUpper : BasisStatus::kAtLower;
  }
  for (int i = 0; i < m; ++i) {
    status[static_cast<std::size_t>(n + i)] = BasisStatus::kBasic;
    head[static_cast<std::size_t>(i)] = n + i;
    pos[static_cast<std::size_t>(n + i)] = i;
  }
  weight.assign(static_cast<std::size_t>(m), 1.0);
  factor.invalidate();
}

// Factorizes the basis, swapping row logicals in for columns that make it
// singular. Returns false when the repaired basis still fails.
bool DualSimplex::Impl::factorize() {
  auto column = [this](int p, std::vector<int>& rows, std::vector<double>& values) {
    const int j = head[static_cast<std::size_t>(p)];
    if (j >= n) {
      rows.push_back(j - n);
      values.push_back(-1.0);
      return;
    }
    for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
      rows.push_back(col_row[static_cast<std::size_t>(k)]);
      values.push_back(col_val[static_cast<std::size_t>(k)]);
    }
  };
  std::vector<int> rows_left;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const std::vector<int> deficient = factor.factorize(m, column, rows_left);
    if (deficient.empty()) return true;
    for (std::size_t t = 0; t < deficient.size() && t < rows_left.size(); ++t) {
      const auto p = static_cast<std::size_t>(deficient[t]);
      const auto out = static_cast<std::size_t>(head[p]);
      const auto in = static_cast<std::size_t>(n + rows_left[t]);
      status[out] = BasisStatus::kAtLower;
      pos[out] = -1;
      status[in] = BasisStatus::kBasic;
      pos[in] = static_cast<int>(p);
      head[p] = n + rows_left[t];
      weight[p] = 1.0;
    }
  }
  return false;
}

void DualSimplex::Impl::add_column(int j, double scale, std::vector<double>& v) const {
  if (j >= n) {
    v[static_cast<std::size_t>(j - n)] -= scale;
    return;
  }
  for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
    v[static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)])] += scale * col_val[static_cast<std::size_t>(k)];
  }
}

double DualSimplex::Impl::dot_column(int j, const std::vector<double>& y) const {
  if (j >= n) return -y[static_cast<std::size_t>(j - n)];
  double s = 0.0;
  for (int k = col_start[static_cast<std::size_t>(j)]; k < col_start[static_cast<std::size_t>(j) + 1]; ++k) {
    s += y[static_cast<std::size_t>(col_row[static_cast<std::size_t>(k)])] * col_val[static_cast<std::size_t>(k)];
  }
  return s;
}

void DualSimplex::Impl::compute_primal() {
  std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < n + m; ++j) {
    if (status[static_cast<std::size_t>(j)] == BasisStatus::kBasic) continue;
    const double v = at_bound(j);
    x[static_cast<std::size_t>(j)] = v;
    if (v != 0.0) add_column(j, -v, rhs);
  }
  factor.ftran(rhs);
  for (int p = 0; p < m; ++p) {
    x[static_cast<std::size_t>(head[static_cast<std::size_t>(p)])] = rhs[static_cast<std::size_t>(p)];
  }
}

void DualSimplex::Impl::compute_duals() {
  std::vector<double> y(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) {
    y[static_cast<std::size_t>(p)] = work_cost[static_cast<std::size_t>(head[static_cast<std::size_t>(p)])];
  }
  factor.btran(y);
  for (int j = 0; j < n + m; ++j) {
    dj[static_cast<std::size_t>(j)] =
        status[static_cast<std::size_t>(j)] == BasisStatus::kBasic ? 0.0 : work_cost[static_cast<std::size_t>(j)] - dot_column(j, y);
  }
}

int DualSimplex::Impl::flip_dual_infeasible(double tol) {
  int flips = 0;
  for (int j = 0; j < n + m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (status[uj] == BasisStatus::kBasic) continue;
    if (fixed(j)) {
      status[uj] = BasisStatus::kAtLower;
      continue;
    }
    if (status[uj] == BasisStatus::kAtLower && dj[uj] < -tol) {
      status[uj] = BasisStatus::kAtUpper;
      ++flips;
    } else if (status[uj] == BasisStatus::kAtUpper && dj[uj] > tol) {
      status[uj] = BasisStatus::kAtLower;
      ++flips;
    }
  }
  return flips;
}

void DualSimplex::Impl::rebuild(double dual_tol) {
  if (!factorize()) {
    slack_basis();
    if (!factorize()) raise(ErrorCode::kNumericalFailure, "slack basis factorization failed");
  }
  compute_duals();
  flip_dual_infeasible(dual_tol);
  compute_primal();
}

// Shifts structural costs by small deterministic amounts in the direction
// that keeps nonbasic columns dual feasible, which breaks dual degeneracy.
// Returns a bound on how far the perturbed objective can move.
double DualSimplex::Impl::perturb() {
  std::mt19937 rng(20260u);
  double margin = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (fixed(j)) continue;
    const double u = static_cast<double>(rng() >> 8) * 0x1p-24;
    const double size = (1e-6 + 1e-5 * std::abs(cost[uj])) * (1.0 + u);
    work_cost[uj] = cost[uj] + (status[uj] == BasisStatus::kAtUpper ? -size : size);
    margin += size * std::max(std::abs(lo[uj]), std::abs(up[uj]));
  }
  return margin;
}

double DualSimplex::Impl::working_objective() const {
  double z = 0.0;
  for (int j = 0; j < n; ++j) z += work_cost[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return z + sign * constant;
}

double DualSimplex::Impl::internal_objective() const {
  double z = 0.0;
  for (int j = 0; j < n; ++j) z += cost[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return z + sign * constant;
}

LpResult DualSimplex::Impl::finish(LpStatus st, long iterations) const {
  LpResult out;
  out.status = st;
  out.iterations = iterations;
  out.values.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    out.values[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] * col_scale[static_cast<std::size_t>(j)];
  }
  out.objective = sign * internal_objective();
  return out;
}

LpResult DualSimplex::Impl::solve(const LpOptions& opt) {
  const double ptol = opt.primal_tolerance;
  const double dtol = opt.dual_tolerance;
  const std::size_t total = static_cast<std::size_t>(n + m);
  for (std::size_t j = 0; j < total; ++j) {
    if (lo[j] > up[j] + ptol) return finish(LpStatus::kInfeasible, 0);
  }
  work_cost = cost;
  if (!factor.valid()) factorize();
  bool perturbed = true;
  double margin = perturb();
  if (factor.valid() && factor.updates() < opt.refactor_interval) {
    compute_duals();
    flip_dual_infeasible(dtol);
    compute_primal();
  } else {
    rebuild(dtol);
  }

  long iter = 0;
  int degenerate = 0;
  int clean_checks = 0;
  int trouble = 0;
  const auto um = static_cast<std::size_t>(m);
  std::vector<double> rho(um);
  std::vector<double> column(um);
  std::vector<double> tau(um);
  std::vector<double> shift(um);
  std::vector<double> alpha(total, 0.0);
  std::vector<char> in_row(total, 0);
  std::vector<int> row_nz;
  std::vector<char> taboo(total, 0);
  std::vector<int> taboo_list;
  std::vector<Candidate> cand;
  std::vector<double> suffix_min;

  while (true) {
    if (iter >= opt.max_iterations) return finish(LpStatus::kIterationLimit, iter);
    if (opt.deadline && (iter % 32 == 0) && std::chrono::steady_clock::now() > *opt.deadline) {
      return finish(LpStatus::kTimeLimit, iter);
    }
    if (factor.updates() >= opt.refactor_interval) rebuild(dtol);

    const bool bland = degenerate >= opt.bland_threshold;

    // Leaving row: largest scaled infeasibility (dual steepest edge).
    int r = -1;
    double best = 0.0;
    for (int p = 0; p < m; ++p) {
      const int j = head[static_cast<std::size_t>(p)];
      const auto uj = static_cast<std::size_t>(j);
      double infeas = 0.0;
      if (x[uj] < lo[uj] - ptol) {
        infeas = lo[uj] - x[uj];
      } else if (x[uj] > up[uj] + ptol) {
        infeas = x[uj] - up[uj];
      } else {
        continue;
      }
      if (bland) {
        if (r < 0 || j < head[static_cast<std::size_t>(r)]) r = p;
      } else {
        const double score = infeas * infeas / weight[static_cast<std::size_t>(p)];
        if (score > best) {
          best = score;
          r = p;
        }
      }
    }
    if (r < 0) {
      if (factor.updates() > 0 && clean_checks < 3) {
        ++clean_checks;
        rebuild(dtol);
        continue;
      }
      if (perturbed) {
        perturbed = false;
        margin = 0.0;
        work_cost = cost;
        clean_checks = 0;
        rebuild(dtol);
        continue;
      }
      return finish(LpStatus::kOptimal, iter);
    }

    const int leaving = head[static_cast<std::size_t>(r)];
    const auto ul = static_cast<std::size_t>(leaving);
    const double sigma = x[ul] > up[ul] ? 1.0 : -1.0;
    const double target = sigma > 0.0 ? up[ul] : lo[ul];

    std::fill(rho.begin(), rho.end(), 0.0);
    rho[static_cast<std::size_t>(r)] = 1.0;
    factor.btran(rho);

    // Pivot row over all columns.
    for (int j : row_nz) {
      alpha[static_cast<std::size_t>(j)] = 0.0;
      in_row[static_cast<std::size_t>(j)] = 0;
    }
    row_nz.clear();
    for (int i = 0; i < m; ++i) {
      const double ri = rho[static_cast<std::size_t>(i)];
      if (std::abs(ri) <= kDropTolerance) continue;
      for (int k = row_start[static_cast<std::size_t>(i)]; k < row_start[static_cast<std::size_t>(i) + 1]; ++k) {
        const auto j = static_cast<std::size_t>(row_col[static_cast<std::size_t>(k)]);
        if (!in_row[j]) {
          in_row[j] = 1;
          row_nz.push_back(static_cast<int>(j));
        }
        alpha[j] += ri * row_val[static_cast<std::size_t>(k)];
      }
      const auto logical = static_cast<std::size_t>(n + i);
      in_row[logical] = 1;
      row_nz.push_back(n + i);
      alpha[logical] = -ri;
    }

    // Ratio test with bound flipping and Harris tolerances.
    cand.clear();
    for (int j : row_nz) {
      const auto uj = static_cast<std::size_t>(j);
      if (status[uj] == BasisStatus::kBasic || fixed(j) || taboo[uj]) continue;
      const double a = sigma * alpha[uj];
      if (status[uj] == BasisStatus::kAtLower && a > kPivotTolerance) {
        cand.push_back({j, dj[uj] / a, (dj[uj] + dtol) / a, a});
      } else if (status[uj] == BasisStatus::kAtUpper && a < -kPivotTolerance) {
        cand.push_back({j, dj[uj] / a, (dj[uj] - dtol) / a, -a});
      }
    }
    if (cand.empty()) {
      if (factor.updates() > 0) {
        rebuild(dtol);
        continue;
      }
      if (!taboo_list.empty()) raise(ErrorCode::kNumericalFailure, "no stable pivot in dual simplex");
      return finish(LpStatus::kInfeasible, iter);
    }
    int q = -1;
    double q_ratio = 0.0;
    if (bland) {
      for (const Candidate& c : cand) {
        if (q < 0 || c.ratio < q_ratio - 1e-12 || (c.ratio <= q_ratio + 1e-12 && c.j < q)) {
          q = c.j;
          q_ratio = c.ratio;
        }
      }
    } else {
      std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        return a.ratio < b.ratio || (a.ratio == b.ratio && a.j < b.j);
      });
      suffix_min.assign(cand.size() + 1, std::numeric_limits<double>::infinity());
      for (std::size_t k = cand.size(); k-- > 0;) suffix_min[k] = std::min(suffix_min[k + 1], cand[k].relaxed);
      double slope = std::abs(x[ul] - target);
      std::size_t start = 0;
      while (true) {
        const double limit = suffix_min[start];
        std::size_t end = start;
        double drop = 0.0;
        while (end < cand.size() && (end == start || cand[end].ratio <= limit)) {
          const auto uj = static_cast<std::size_t>(cand[end].j);
          drop += cand[end].size * (up[uj] - lo[uj]);
          ++end;
        }
        if (end < cand.size() && slope - drop > 0.0) {
          slope -= drop;
          start = end;
          continue;
        }
        double size = 0.0;
        for (std::size_t k = start; k < end; ++k) {
          if (cand[k].size > size) {
            size = cand[k].size;
            q = cand[k].j;
            q_ratio = cand[k].ratio;
          }
        }
        break;
      }
    }
    const auto uq = static_cast<std::size_t>(q);
    const double step = std::max(q_ratio, 0.0);
    const double theta = sigma * step;

    std::fill(column.begin(), column.end(), 0.0);
    add_column(q, 1.0, column);
    factor.ftran(column);
    const double pivot = column[static_cast<std::size_t>(r)];
    if (std::abs(pivot - alpha[uq]) > 1e-7 * (1.0 + std::abs(pivot)) || std::abs(pivot) < kPivotTolerance) {
      if (++trouble > kTroubleLimit) raise(ErrorCode::kNumericalFailure, "unstable pivot in dual simplex");
      if (factor.updates() > 0) {
        rebuild(dtol);
        continue;
      }
      taboo[uq] = 1;
      taboo_list.push_back(q);
      continue;
    }
    for (int j : taboo_list) taboo[static_cast<std::size_t>(j)] = 0;
    taboo_list.clear();

    // Dual steepest-edge weights.
    double beta_r = 0.0;
    for (double v : rho) beta_r += v * v;
    tau = rho;
    factor.ftran(tau);
    for (int p = 0; p < m; ++p) {
      if (p == r) continue;
      const double ratio = column[static_cast<std::size_t>(p)] / pivot;
      if (ratio == 0.0) continue;
      double& w = weight[static_cast<std::size_t>(p)];
      w = std::max(w - 2.0 * ratio * tau[static_cast<std::size_t>(p)] + ratio * ratio * beta_r, 1e-8);
    }
    weight[static_cast<std::size_t>(r)] = std::max(beta_r / (pivot * pivot), 1e-8);

    // Primal step.
    const double delta = (x[ul] - target) / pivot;
    for (int p = 0; p < m; ++p) {
      const double c = column[static_cast<std::size_t>(p)];
      if (c != 0.0) x[static_cast<std::size_t>(head[static_cast<std::size_t>(p)])] -= c * delta;
    }
    x[uq] += delta;
    x[ul] = target;

    // Dual step.
    for (int j : row_nz) {
      const auto uj = static_cast<std::size_t>(j);
      if (status[uj] != BasisStatus::kBasic) dj[uj] -= theta * alpha[uj];
    }
    dj[uq] = 0.0;
    dj[ul] = -theta;

    // Basis change.
    status[ul] = sigma > 0.0 ? BasisStatus::kAtUpper : BasisStatus::kAtLower;
    if (fixed(leaving)) status[ul] = BasisStatus::kAtLower;
    status[uq] = BasisStatus::kBasic;
    pos[ul] = -1;
    pos[uq] = r;
    head[static_cast<std::size_t>(r)] = q;
    factor.update(r, column);

    // Restore dual feasibility by bound flips.
    bool any_flip = false;
    for (int j : row_nz) {
      const auto uj = static_cast<std::size_t>(j);
      if (status[uj] == BasisStatus::kBasic || fixed(j)) continue;
      double change = 0.0;
      if (status[uj] == BasisStatus::kAtLower && dj[uj] < -dtol) {
        status[uj] = BasisStatus::kAtUpper;
        change = up[uj] - lo[uj];
      } else if (status[uj] == BasisStatus::kAtUpper && dj[uj] > dtol) {
        status[uj] = BasisStatus::kAtLower;
        change = lo[uj] - up[uj];
      } else {
        continue;
      }
      if (!any_flip) std::fill(shift.begin(), shift.end(), 0.0);
      x[uj] += change;
      add_column(j, change, shift);
      any_flip = true;
    }
    if (any_flip) {
      factor.ftran(shift);
      for (int p = 0; p < m; ++p) {
        x[static_cast<std::size_t>(head[static_cast<std::size_t>(p)])] -= shift[static_cast<std::size_t>(p)];
      }
    }

    ++iter;
    degenerate = step <= 1e-12 ? degenerate + 1 : 0;

    if (std::isfinite(opt.cutoff)) {
      const double limit = opt.cutoff + margin + 1e-9 * (1.0 + std::abs(opt.cutoff));
      if (working_objective() > limit) {
        // Confirm on a fresh factorization before trusting the bound.
        rebuild(dtol);
        if (working_objective() > limit) {
          return finish(LpStatus::kCutoff, iter);
        }
      }
    }
  }
}

DualSimplex::DualSimplex(const MilpInstance& instance)
    : impl_(std::make_unique<Impl>(instance, instance.objective())) {}

DualSimplex::DualSimplex(const MilpInstance& instance, const Objective& objective)
    : impl_(std::make_unique<Impl>(instance, objective)) {}

DualSimplex::DualSimplex(const DualSimplex& other) : impl_(std::make_unique<Impl>(*other.impl_)) {}

DualSimplex& DualSimplex::operator=(const DualSimplex& other) {
  if (this != &other) impl_ = std::make_unique<Impl>(*other.impl_);
  return *this;
}

DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;
DualSimplex::~DualSimplex() = default;

int DualSimplex::num_structural() const { return impl_->n; }
int DualSimplex::num_rows() const { return impl_->m; }

void DualSimplex::set_bounds(int var, double lower, double upper) {
  const auto u = static_cast<std::size_t>(var);
  impl_->lo.at(u) = lower / impl_->col_scale.at(u);
  impl_->up.at(u) = upper / impl_->col_scale.at(u);
}

double DualSimplex::lower(int var) const {
  const auto u = static_cast<std::size_t>(var);
  return impl_->lo.at(u) * impl_->col_scale.at(u);
}

double DualSimplex::upper(int var) const {
  const auto u = static_cast<std::size_t>(var);
  return impl_->up.at(u) * impl_->col_scale.at(u);
}

void DualSimplex::reset_bounds() {
  impl_->lo = impl_->root_lo;
  impl_->up = impl_->root_up;
}

std::vector<BasisStatus> DualSimplex::basis() const { return impl_->status; }

void DualSimplex::set_basis(const std::vector<BasisStatus>& statuses) {
  Impl& s = *impl_;
  const std::size_t total = static_cast<std::size_t>(s.n + s.m);
  if (statuses.size() != total ||
      std::count(statuses.begin(), statuses.end(), BasisStatus::kBasic) != s.m) {
    s.slack_basis();
    return;
  }
  s.status = statuses;
  s.pos.assign(total, -1);
  int p = 0;
  for (int j = 0; j < s.n + s.m; ++j) {
    if (s.status[static_cast<std::size_t>(j)] == BasisStatus::kBasic) {
      s.head[static_cast<std::size_t>(p)] = j;
      s.pos[static_cast<std::size_t>(j)] = p;
      ++p;
    }
  }
  s.weight.assign(static_cast<std::size_t>(s.m), 1.0);
  s.factor.invalidate();
}

LpResult DualSimplex::solve(const LpOptions& options) { return impl_->solve(options); }

LpResult solve_lp_relaxation(const MilpInstance& instance, const LpOptions& options) {
  DualSimplex lp(instance);
  return lp.solve(options);
}

}  // namespace metrott
