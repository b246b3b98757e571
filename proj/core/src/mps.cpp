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

#include "metrott/mps.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "metrott/error.hpp"

namespace metrott {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMpsInfinity = 1e30;
constexpr const char* kObjRow = "OBJ";
constexpr const char* kBoundSet = "BND";
constexpr const char* kRhsSet = "RHS";

std::string number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

class LineWriter {
 public:
  LineWriter(std::ostream& out, MpsDialect dialect) : out_(out), fixed_(dialect == MpsDialect::kFixed) {}

  // One data record: code, then name/value fields.
  void record(std::string_view code, std::string_view n1, std::string_view n2 = {},
              std::string_view v1 = {}) {
    std::string line;
    if (fixed_) {
      line = " " + std::string(code);
      pad(line, 4);
      line += n1;
      if (!n2.empty() || !v1.empty()) {
        pad(line, 14);
        line += n2;
      }
      if (!v1.empty()) {
        pad(line, 24);
        line += v1;
      }
    } else {
      line = code.empty() ? "    " : " " + std::string(code) + " ";
      line += n1;
      if (!n2.empty()) line += " " + std::string(n2);
      if (!v1.empty()) line += " " + std::string(v1);
    }
    out_ << line << '\n';
  }

 private:
  static void pad(std::string& line, std::size_t column) {
    if (line.size() < column) {
      line.append(column - line.size(), ' ');
    } else {
      line += ' ';
    }
  }

  std::ostream& out_;
  bool fixed_;
};

char sense_code(RowSense s) {
  switch (s) {
    case RowSense::kLessEqual: return 'L';
    case RowSense::kEqual: return 'E';
    case RowSense::kGreaterEqual: return 'G';
  }
  return 'E';
}

bool fits_fixed(std::string_view name) { return name.size() <= 8; }

[[noreturn]] void parse_fail(int line, const std::string& what) {
  raise(ErrorCode::kParseError, "MPS line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view text, int line) {
  double v = 0.0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || std::isnan(v)) {
    parse_fail(line, "bad number '" + std::string(text) + "'");
  }
  if (v >= kMpsInfinity) return kInf;
  if (v <= -kMpsInfinity) return -kInf;
  return v;
}

struct PendingRow {
  std::string name;
  RowSense sense = RowSense::kEqual;
  std::map<int, double> terms;
  double rhs = 0.0;
  std::optional<double> range;
};

}  // namespace

MpsDialect choose_dialect(const MilpInstance& instance) {
  for (const auto& v : instance.variables()) {
    if (!fits_fixed(v.name)) return MpsDialect::kFree;
  }
  for (const auto& r : instance.constraints()) {
    if (!fits_fixed(r.name)) return MpsDialect::kFree;
  }
  return MpsDialect::kFixed;
}

void write_mps(std::ostream& out, const MilpInstance& instance, const std::string& name) {
  const MpsDialect dialect = choose_dialect(instance);
  LineWriter w(out, dialect);
  if (dialect == MpsDialect::kFree) {
    out << "* free MPS: some row or column names exceed 8 characters\n";
  }
  out << (dialect == MpsDialect::kFixed ? "NAME          " : "NAME ") << name << '\n';
  const Objective& obj = instance.objective();
  if (obj.sense == ObjSense::kMaximize) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n";
  w.record("N", kObjRow);
  for (const Constraint& row : instance.constraints()) w.record(std::string(1, sense_code(row.sense)), row.name);

  // Column-wise view of the rows.
  const auto nvars = static_cast<std::size_t>(instance.num_variables());
  std::vector<std::vector<std::pair<std::size_t, double>>> columns(nvars);
  const auto& rows = instance.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const Term& t : rows[r].terms) columns[static_cast<std::size_t>(t.var)].push_back({r, t.coef});
  }
  std::vector<double> cost(nvars, 0.0);
  for (const Term& t : obj.terms) cost[static_cast<std::size_t>(t.var)] += t.coef;

  out << "COLUMNS\n";
  for (std::size_t j = 0; j < nvars; ++j) {
    const std::string& col = instance.variable(static_cast<int>(j)).name;
    if (cost[j] != 0.0 || columns[j].empty()) w.record("", col, kObjRow, number(cost[j]));
    for (const auto& [r, coef] : columns[j]) w.record("", col, rows[r].name, number(coef));
  }
  out << "RHS\n";
  if (obj.constant != 0.0) w.record("", kRhsSet, kObjRow, number(-obj.constant));
  for (const Constraint& row : rows) {
    if (row.rhs != 0.0) w.record("", kRhsSet, row.name, number(row.rhs));
  }
  out << "BOUNDS\n";
  for (const Variable& v : instance.variables()) {
    if (v.kind == VarKind::kBinary) {
      w.record("BV", kBoundSet, v.name);
      if (v.lower != 0.0) w.record("LO", kBoundSet, v.name, number(v.lower));
      if (v.upper != 1.0) w.record("UP", kBoundSet, v.name, number(v.upper));
      continue;
    }
    if (v.lower == v.upper) {
      w.record("FX", kBoundSet, v.name, number(v.lower));
    } else if (v.lower == -kInf && v.upper == kInf) {
      w.record("FR", kBoundSet, v.name);
    } else {
      if (v.lower == -kInf) {
        w.record("MI", kBoundSet, v.name);
      } else if (v.lower != 0.0) {
        w.record("LO", kBoundSet, v.name, number(v.lower));
      }
      if (v.upper != kInf) w.record("UP", kBoundSet, v.name, number(v.upper));
    }
  }
  out << "ENDATA\n";
}

void write_mps(const std::filesystem::path& path, const MilpInstance& instance, const std::string& name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIoFailure, "cannot write " + path.string());
  write_mps(out, instance, name);
  out.flush();
  if (!out) raise(ErrorCode::kIoFailure, "failed writing " + path.string());
}

MilpInstance read_mps(std::istream& in) {
  enum class Section { kNone, kName, kObjSense, kRows, kColumns, kRhs, kRanges, kBounds, kEnd };
  Section section = Section::kNone;
  std::string objective_row;
  ObjSense sense = ObjSense::kMinimize;
  double constant = 0.0;
  std::vector<PendingRow> rows;
  std::map<std::string, std::size_t, std::less<>> row_index;
  std::vector<Variable> vars;
  std::map<std::string, std::size_t, std::less<>> var_index;
  std::vector<double> cost;
  bool integer_block = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        section = Section::kName;
      } else if (head == "OBJSENSE") {
        section = Section::kObjSense;
        if (tok.size() > 1) {
          if (tok[1] == "MAX" || tok[1] == "MAXIMIZE") {
            sense = ObjSense::kMaximize;
          } else if (tok[1] != "MIN" && tok[1] != "MINIMIZE") {
            parse_fail(line_no, "unknown objective sense '" + tok[1] + "'");
          }
        }
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "RANGES") {
        section = Section::kRanges;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "ENDATA") {
        section = Section::kEnd;
        break;
      } else {
        parse_fail(line_no, "unknown section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kNone:
      case Section::kName:
      case Section::kEnd:
        parse_fail(line_no, "data outside a section");
      case Section::kObjSense:
        if (tok[0] == "MAX" || tok[0] == "MAXIMIZE") {
          sense = ObjSense::kMaximize;
        } else if (tok[0] == "MIN" || tok[0] == "MINIMIZE") {
          sense = ObjSense::kMinimize;
        } else {
          parse_fail(line_no, "unknown objective sense '" + tok[0] + "'");
        }
        break;
      case Section::kRows: {
        if (tok.size() != 2) parse_fail(line_no, "row records need a type and a name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          break;
        }
        PendingRow row;
        row.name = tok[1];
        if (type == "E") {
          row.sense = RowSense::kEqual;
        } else if (type == "L") {
          row.sense = RowSense::kLessEqual;
        } else if (type == "G") {
          row.sense = RowSense::kGreaterEqual;
        } else {
          parse_fail(line_no, "unknown row type '" + type + "'");
        }
        if (row_index.count(row.name) || row.name == objective_row) {
          parse_fail(line_no, "duplicate row '" + row.name + "'");
        }
        row_index[row.name] = rows.size();
        rows.push_back(std::move(row));
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            integer_block = true;
          } else if (tok[2] == "'INTEND'") {
            integer_block = false;
          } else {
            parse_fail(line_no, "unknown marker '" + tok[2] + "'");
          }
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) parse_fail(line_no, "column records need 3 or 5 fields");
        auto it = var_index.find(tok[0]);
        std::size_t j = 0;
        if (it == var_index.end()) {
          j = vars.size();
          var_index[tok[0]] = j;
          Variable v;
          v.name = tok[0];
          v.kind = integer_block ? VarKind::kBinary : VarKind::kContinuous;
          v.lower = 0.0;
          v.upper = integer_block ? 1.0 : kInf;
          vars.push_back(v);
          cost.push_back(0.0);
        } else {
          j = it->second;
        }
        for (std::size_t f = 1; f + 1 < tok.size(); f += 2) {
          const double value = parse_number(tok[f + 1], line_no);
          if (!std::isfinite(value)) parse_fail(line_no, "coefficient must be finite");
          if (tok[f] == objective_row) {
            cost[j] += value;
            continue;
          }
          auto r = row_index.find(tok[f]);
          if (r == row_index.end()) parse_fail(line_no, "unknown row '" + tok[f] + "'");
          rows[r->second].terms[static_cast<int>(j)] += value;
        }
        break;
      }
      case Section::kRhs:
      case Section::kRanges: {
        // The set name is optional in free MPS: an odd field count has it.
        const std::size_t start = tok.size() % 2 == 1 ? 1 : 0;
        if (tok.size() < 2) parse_fail(line_no, "record needs a row and a value");
        for (std::size_t f = start; f + 1 < tok.size(); f += 2) {
          const double value = parse_number(tok[f + 1], line_no);
          if (!std::isfinite(value)) parse_fail(line_no, "value must be finite");
          if (tok[f] == objective_row) {
            if (section == Section::kRanges) parse_fail(line_no, "the objective row has no range");
            constant = -value;
            continue;
          }
          auto r = row_index.find(tok[f]);
          if (r == row_index.end()) parse_fail(line_no, "unknown row '" + tok[f] + "'");
          if (section == Section::kRhs) {
            rows[r->second].rhs = value;
          } else {
            rows[r->second].range = value;
          }
        }
        break;
      }
      case Section::kBounds: {
        const std::string& type = tok[0];
        const bool valueless = type == "FR" || type == "MI" || type == "PL" || type == "BV";
        std::string col;
        std::string value_text;
        if (valueless) {
          if (tok.size() == 3) {
            col = tok[2];
          } else if (tok.size() == 2) {
            col = tok[1];
          } else {
            parse_fail(line_no, "bad bound record");
          }
        } else {
          if (tok.size() == 4) {
            col = tok[2];
            value_text = tok[3];
          } else if (tok.size() == 3) {
            col = tok[1];
            value_text = tok[2];
          } else {
            parse_fail(line_no, "bad bound record");
          }
        }
        auto it = var_index.find(col);
        if (it == var_index.end()) parse_fail(line_no, "unknown column '" + col + "'");
        Variable& v = vars[it->second];
        const double value = value_text.empty() ? 0.0 : parse_number(value_text, line_no);
        if (type == "LO") {
          v.lower = value;
        } else if (type == "UP") {
          v.upper = value;
        } else if (type == "FX") {
          v.lower = value;
          v.upper = value;
        } else if (type == "FR") {
          v.lower = -kInf;
          v.upper = kInf;
        } else if (type == "MI") {
          v.lower = -kInf;
        } else if (type == "PL") {
          v.upper = kInf;
        } else if (type == "BV") {
          v.kind = VarKind::kBinary;
          v.lower = 0.0;
          v.upper = 1.0;
        } else if (type == "LI" || type == "UI") {
          v.kind = VarKind::kBinary;
          (type == "LI" ? v.lower : v.upper) = value;
        } else {
          parse_fail(line_no, "unknown bound type '" + type + "'");
        }
        if (v.kind == VarKind::kBinary && (v.lower < 0.0 || v.upper > 1.0)) {
          parse_fail(line_no, "integer column '" + v.name + "' must stay within [0, 1]");
        }
        break;
      }
    }
  }
  if (section != Section::kEnd) parse_fail(line_no, "missing ENDATA");
  if (objective_row.empty()) parse_fail(line_no, "no objective row");

  MilpInstance out;
  for (const Variable& v : vars) {
    if (v.kind == VarKind::kBinary && v.upper > 1.0) {
      raise(ErrorCode::kParseError, "integer column '" + v.name + "' must stay within [0, 1]");
    }
    out.add_variable(v.name, v.kind, v.lower, v.upper);
  }
  for (PendingRow& pr : rows) {
    Constraint row;
    row.name = pr.name;
    row.sense = pr.sense;
    row.rhs = pr.rhs;
    for (const auto& [var, coef] : pr.terms) row.terms.push_back({var, coef});
    if (!pr.range) {
      out.add_constraint(std::move(row));
      continue;
    }
    // Ranged rows: [rhs - |R|, rhs] for L, [rhs, rhs + |R|] for G, and the
    // sign of R picks the side for E.
    const double r = *pr.range;
    double lo = pr.rhs;
    double hi = pr.rhs;
    if (pr.sense == RowSense::kLessEqual) {
      lo = pr.rhs - std::abs(r);
    } else if (pr.sense == RowSense::kGreaterEqual) {
      hi = pr.rhs + std::abs(r);
    } else if (r >= 0.0) {
      hi = pr.rhs + r;
    } else {
      lo = pr.rhs + r;
    }
    Constraint upper = row;
    upper.sense = RowSense::kLessEqual;
    upper.rhs = hi;
    Constraint lower = row;
    lower.name = row.name + "~range";
    lower.sense = RowSense::kGreaterEqual;
    lower.rhs = lo;
    out.add_constraint(std::move(upper));
    out.add_constraint(std::move(lower));
  }
  Objective obj;
  obj.sense = sense;
  obj.constant = constant;
  for (std::size_t j = 0; j < cost.size(); ++j) {
    if (cost[j] != 0.0) obj.terms.push_back({static_cast<int>(j), cost[j]});
  }
  out.set_objective(std::move(obj));
  return out;
}

MilpInstance read_mps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIoFailure, "cannot open " + path.string());
  return read_mps(in);
}

}  // namespace metrott
