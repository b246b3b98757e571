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

#ifndef METROTT_MPS_HPP_
#define METROTT_MPS_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "metrott/milp.hpp"

namespace metrott {

enum class MpsDialect { kFixed, kFree };

// Fixed columns when every row and column name fits in 8 characters, the
// free dialect otherwise.
MpsDialect choose_dialect(const MilpInstance& instance);

// Writes ROWS, COLUMNS, RHS, RANGES and BOUNDS; binaries are marked BV. The
// objective constant is stored as the negated RHS of the objective row.
void write_mps(std::ostream& out, const MilpInstance& instance, const std::string& name = "metrott");
void write_mps(const std::filesystem::path& path, const MilpInstance& instance,
               const std::string& name = "metrott");

// Reads either dialect (fields split on whitespace). Ranged rows become a
// pair of one-sided rows, the second one suffixed "~range". Integer columns
// between MARKER lines must have bounds inside [0, 1].
MilpInstance read_mps(std::istream& in);
MilpInstance read_mps(const std::filesystem::path& path);

}  // namespace metrott

#endif  // METROTT_MPS_HPP_
