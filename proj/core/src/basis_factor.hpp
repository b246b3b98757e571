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


#ifndef METROTT_SRC_BASIS_FACTOR_HPP_
#define METROTT_SRC_BASIS_FACTOR_HPP_

#include <functional>
#include <vector>

namespace metrott::detail {

// Sparse LU factors of a simplex basis followed by product-form updates.
// Basis columns are addressed by position 0..m-1 and rows by index 0..m-1.
// The factorization pivots singletons first and then eliminates the
// remaining kernel with Markowitz ordering under threshold partial pivoting.
class BasisFactor {
 public:
  using ColumnFn = std::function<void(int position, std::vector<int>& rows, std::vector<double>& values)>;

  // Returns the positions that could not be pivoted. When the result is not
  // empty, rows_left holds as many rows that received no pivot.
  std::vector<int> factorize(int m, const ColumnFn& column, std::vector<int>& rows_left);

  // Solves B x = v. The input is indexed by row, the output by position.
  void ftran(std::vector<double>& v) const;
  // Solves B^T y = v. The input is indexed by position, the output by row.
  void btran(std::vector<double>& v) const;
  // Replaces the column at position r; column is the FTRAN'd entering column.
  void update(int r, const std::vector<double>& column);

  int updates() const { return static_cast<int>(eta_pos_.size()); }
  bool valid() const { return valid_; }
  void invalidate() { valid_ = false; }
  long fill() const { return static_cast<long>(l_index_.size() + ur_index_.size()); }

 private:
  int m_ = 0;
  bool valid_ = false;
  std::vector<int> prow_;
  std::vector<int> pcol_;
  std::vector<double> piv_;
  std::vector<int> l_start_;
  std::vector<int> l_index_;
  std::vector<double> l_value_;
  std::vector<int> ur_start_;
  std::vector<int> ur_index_;
  std::vector<double> ur_value_;
  std::vector<int> uc_start_;
  std::vector<int> uc_index_;
  std::vector<double> uc_value_;
  std::vector<int> eta_pos_;
  std::vector<double> eta_pivot_;
  std::vector<int> eta_start_{0};
  std::vector<int> eta_index_;
  std::vector<double> eta_value_;
  mutable std::vector<double> work_;
};

}  // namespace metrott::detail

#endif  // METROTT_SRC_BASIS_FACTOR_HPP_
