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


#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace metrott::detail {
namespace {

constexpr double kThreshold = 0.1;
constexpr double kSingletonTolerance = 1e-9;
constexpr double kZeroTolerance = 1e-11;
constexpr double kDropTolerance = 1e-14;
constexpr std::size_t kSearchColumns = 4;

struct Entry {
  int col;
  double value;
};

struct RowValue {
  int row;
  double value;
};

std::size_t at(int i) { return static_cast<std::size_t>(i); }

}  // namespace

std::vector<int> BasisFactor::factorize(int m, const ColumnFn& column, std::vector<int>& rows_left) {
  m_ = m;
  valid_ = false;
  prow_.clear();
  pcol_.clear();
  piv_.clear();
  l_start_.assign(1, 0);
  l_index_.clear();
  l_value_.clear();
  ur_start_.assign(1, 0);
  ur_index_.clear();
  ur_value_.clear();
  eta_pos_.clear();
  eta_pivot_.clear();
  eta_start_.assign(1, 0);
  eta_index_.clear();
  eta_value_.clear();
  rows_left.clear();

  std::vector<std::vector<Entry>> rows(at(m));
  std::vector<std::vector<int>> cols(at(m));
  std::vector<int> rcount(at(m), 0);
  std::vector<int> ccount(at(m), 0);
  std::vector<char> ractive(at(m), 1);
  std::vector<char> cactive(at(m), 1);
  {
    std::vector<int> ri;
    std::vector<double> rv;
    for (int p = 0; p < m; ++p) {
      ri.clear();
      rv.clear();
      column(p, ri, rv);
      for (std::size_t k = 0; k < ri.size(); ++k) {
        if (rv[k] == 0.0) continue;
        rows[at(ri[k])].push_back({p, rv[k]});
        cols[at(p)].push_back(ri[k]);
      }
    }
  }
  for (int i = 0; i < m; ++i) rcount[at(i)] = static_cast<int>(rows[at(i)].size());
  for (int p = 0; p < m; ++p) ccount[at(p)] = static_cast<int>(cols[at(p)].size());

  std::vector<int> seen(at(m), -1);
  int stamp = 0;
  std::vector<RowValue> colvals;
  auto value_at = [&](int i, int p) {
    for (const Entry& e : rows[at(i)]) {
      if (e.col == p) return e.value;
    }
    return 0.0;
  };
  // Active rows of column p with their nonzero values, without duplicates.
  auto gather_column = [&](int p) {
    colvals.clear();
    ++stamp;
    for (int j : cols[at(p)]) {
      if (!ractive[at(j)] || seen[at(j)] == stamp) continue;
      seen[at(j)] = stamp;
      const double v = value_at(j, p);
      if (v != 0.0) colvals.push_back({j, v});
    }
  };
  auto record = [&](int i, int p, double a) {
    prow_.push_back(i);
    pcol_.push_back(p);
    piv_.push_back(a);
    for (const Entry& e : rows[at(i)]) {
      if (e.col != p && cactive[at(e.col)]) {
        ur_index_.push_back(e.col);
        ur_value_.push_back(e.value);
      }
    }
    ur_start_.push_back(static_cast<int>(ur_index_.size()));
  };

  // Singleton phase.
  std::vector<int> cstack;
  std::vector<int> rstack;
  for (int p = 0; p < m; ++p) {
    if (ccount[at(p)] == 1) cstack.push_back(p);
  }
  for (int i = 0; i < m; ++i) {
    if (rcount[at(i)] == 1) rstack.push_back(i);
  }
  while (!cstack.empty() || !rstack.empty()) {
    if (!cstack.empty()) {
      const int p = cstack.back();
      cstack.pop_back();
      if (!cactive[at(p)] || ccount[at(p)] != 1) continue;
      gather_column(p);
      if (colvals.size() != 1 || std::abs(colvals[0].value) < kSingletonTolerance) continue;
      const int i = colvals[0].row;
      record(i, p, colvals[0].value);
      l_start_.push_back(static_cast<int>(l_index_.size()));
      ractive[at(i)] = 0;
      cactive[at(p)] = 0;
      for (const Entry& e : rows[at(i)]) {
        if (cactive[at(e.col)] && --ccount[at(e.col)] == 1) cstack.push_back(e.col);
      }
      continue;
    }
    const int i = rstack.back();
    rstack.pop_back();
    if (!ractive[at(i)] || rcount[at(i)] != 1) continue;
    int p = -1;
    double a = 0.0;
    for (const Entry& e : rows[at(i)]) {
      if (cactive[at(e.col)]) {
        p = e.col;
        a = e.value;
        break;
      }
    }
    if (p < 0) continue;
    gather_column(p);
    double cmax = 0.0;
    for (const RowValue& rv : colvals) cmax = std::max(cmax, std::abs(rv.value));
    if (std::abs(a) < kSingletonTolerance || std::abs(a) < kThreshold * cmax) continue;
    record(i, p, a);
    for (const RowValue& rv : colvals) {
      if (rv.row == i) continue;
      l_index_.push_back(rv.row);
      l_value_.push_back(rv.value / a);
      if (--rcount[at(rv.row)] == 1) rstack.push_back(rv.row);
    }
    l_start_.push_back(static_cast<int>(l_index_.size()));
    ractive[at(i)] = 0;
    cactive[at(p)] = 0;
  }

  // Kernel phase.
  std::vector<int> deficient;
  std::vector<int> active_cols;
  for (int p = 0; p < m; ++p) {
    if (cactive[at(p)]) active_cols.push_back(p);
  }
  std::vector<int> slot(at(m), -1);
  std::vector<int> slot_owner(at(m), -1);
  std::vector<int> candidates;
  std::vector<Entry> pivot_row;
  std::vector<Entry> updated;
  while (true) {
    active_cols.erase(std::remove_if(active_cols.begin(), active_cols.end(),
                                     [&](int p) { return !cactive[at(p)]; }),
                      active_cols.end());
    if (active_cols.empty()) break;
    candidates = active_cols;
    if (candidates.size() > kSearchColumns) {
      std::nth_element(candidates.begin(), candidates.begin() + kSearchColumns, candidates.end(),
                       [&](int x, int y) { return ccount[at(x)] < ccount[at(y)]; });
      candidates.resize(kSearchColumns);
    }
    int r = -1;
    int p = -1;
    double a = 0.0;
    long best_cost = 0;
    for (int c : candidates) {
      gather_column(c);
      double cmax = 0.0;
      for (const RowValue& rv : colvals) cmax = std::max(cmax, std::abs(rv.value));
      if (cmax < kZeroTolerance) {
        deficient.push_back(c);
        cactive[at(c)] = 0;
        for (const RowValue& rv : colvals) --rcount[at(rv.row)];
        continue;
      }
      for (const RowValue& rv : colvals) {
        if (std::abs(rv.value) < kThreshold * cmax) continue;
        const long cost = static_cast<long>(rcount[at(rv.row)] - 1) * static_cast<long>(colvals.size() - 1);
        if (p < 0 || cost < best_cost || (cost == best_cost && std::abs(rv.value) > std::abs(a))) {
          r = rv.row;
          p = c;
          a = rv.value;
          best_cost = cost;
        }
      }
    }
    if (p < 0) continue;
    if (!cactive[at(p)]) continue;

    gather_column(p);
    std::vector<RowValue> targets = colvals;
    record(r, p, a);
    pivot_row.clear();
    for (int k = ur_start_[ur_start_.size() - 2]; k < ur_start_.back(); ++k) {
      pivot_row.push_back({ur_index_[at(k)], ur_value_[at(k)]});
    }
    for (const RowValue& target : targets) {
      const int j = target.row;
      if (j == r) continue;
      const double l = target.value / a;
      l_index_.push_back(j);
      l_value_.push_back(l);
      updated.clear();
      for (const Entry& e : rows[at(j)]) {
        if (e.col == p || !cactive[at(e.col)]) continue;
        slot[at(e.col)] = static_cast<int>(updated.size());
        slot_owner[at(e.col)] = j;
        updated.push_back(e);
      }
      --rcount[at(j)];
      for (const Entry& e : pivot_row) {
        if (slot_owner[at(e.col)] == j) {
          updated[at(slot[at(e.col)])].value -= l * e.value;
        } else {
          slot[at(e.col)] = static_cast<int>(updated.size());
          slot_owner[at(e.col)] = j;
          updated.push_back({e.col, -l * e.value});
          cols[at(e.col)].push_back(j);
          ++ccount[at(e.col)];
          ++rcount[at(j)];
        }
      }
      std::vector<Entry> kept;
      kept.reserve(updated.size());
      for (const Entry& e : updated) {
        slot_owner[at(e.col)] = -1;
        if (std::abs(e.value) < kDropTolerance) {
          --ccount[at(e.col)];
          --rcount[at(j)];
        } else {
          kept.push_back(e);
        }
      }
      rows[at(j)].swap(kept);
    }
    l_start_.push_back(static_cast<int>(l_index_.size()));
    for (const Entry& e : pivot_row) --ccount[at(e.col)];
    ractive[at(r)] = 0;
    cactive[at(p)] = 0;
  }

  if (!deficient.empty()) {
    for (int i = 0; i < m; ++i) {
      if (ractive[at(i)]) rows_left.push_back(i);
    }
    return deficient;
  }

  // Column-wise copy of U for FTRAN.
  uc_start_.assign(at(m) + 1, 0);
  for (int c : ur_index_) ++uc_start_[at(c) + 1];
  for (int c = 0; c < m; ++c) uc_start_[at(c) + 1] += uc_start_[at(c)];
  uc_index_.assign(ur_index_.size(), 0);
  uc_value_.assign(ur_index_.size(), 0.0);
  {
    std::vector<int> fill(uc_start_.begin(), uc_start_.end() - 1);
    for (int k = 0; k < m; ++k) {
      for (int e = ur_start_[at(k)]; e < ur_start_[at(k) + 1]; ++e) {
        const int dest = fill[at(ur_index_[at(e)])]++;
        uc_index_[at(dest)] = prow_[at(k)];
        uc_value_[at(dest)] = ur_value_[at(e)];
      }
    }
  }
  work_.assign(at(m), 0.0);
  valid_ = true;
  return {};
}

void BasisFactor::ftran(std::vector<double>& v) const {
  const int m = m_;
  for (int k = 0; k < m; ++k) {
    const double t = v[at(prow_[at(k)])];
    if (t == 0.0) continue;
    for (int e = l_start_[at(k)]; e < l_start_[at(k) + 1]; ++e) v[at(l_index_[at(e)])] -= l_value_[at(e)] * t;
  }
  work_.assign(at(m), 0.0);
  for (int k = m - 1; k >= 0; --k) {
    const double xk = v[at(prow_[at(k)])] / piv_[at(k)];
    const int c = pcol_[at(k)];
    work_[at(c)] = xk;
    if (xk == 0.0) continue;
    for (int e = uc_start_[at(c)]; e < uc_start_[at(c) + 1]; ++e) v[at(uc_index_[at(e)])] -= uc_value_[at(e)] * xk;
  }
  v.swap(work_);
  for (std::size_t t = 0; t < eta_pos_.size(); ++t) {
    const int r = eta_pos_[t];
    const double yr = v[at(r)] / eta_pivot_[t];
    if (yr != 0.0) {
      for (int e = eta_start_[t]; e < eta_start_[t + 1]; ++e) v[at(eta_index_[at(e)])] -= eta_value_[at(e)] * yr;
    }
    v[at(r)] = yr;
  }
}

void BasisFactor::btran(std::vector<double>& v) const {
  const int m = m_;
  for (std::size_t t = eta_pos_.size(); t-- > 0;) {
    const int r = eta_pos_[t];
    double s = v[at(r)];
    for (int e = eta_start_[t]; e < eta_start_[t + 1]; ++e) s -= v[at(eta_index_[at(e)])] * eta_value_[at(e)];
    v[at(r)] = s / eta_pivot_[t];
  }
  work_.assign(at(m), 0.0);
  for (int k = 0; k < m; ++k) {
    const double zk = v[at(pcol_[at(k)])] / piv_[at(k)];
    work_[at(prow_[at(k)])] = zk;
    if (zk == 0.0) continue;
    for (int e = ur_start_[at(k)]; e < ur_start_[at(k) + 1]; ++e) v[at(ur_index_[at(e)])] -= ur_value_[at(e)] * zk;
  }
  for (int k = m - 1; k >= 0; --k) {
    double s = 0.0;
    for (int e = l_start_[at(k)]; e < l_start_[at(k) + 1]; ++e) s += l_value_[at(e)] * work_[at(l_index_[at(e)])];
    if (s != 0.0) work_[at(prow_[at(k)])] -= s;
  }
  v.swap(work_);
}

void BasisFactor::update(int r, const std::vector<double>& column) {
  eta_pos_.push_back(r);
  eta_pivot_.push_back(column[at(r)]);
  for (int p = 0; p < m_; ++p) {
    if (p != r && std::abs(column[at(p)]) > kDropTolerance) {
      eta_index_.push_back(p);
      eta_value_.push_back(column[at(p)]);
    }
  }
  eta_start_.push_back(static_cast<int>(eta_index_.size()));
}

}  // namespace metrott::detail
