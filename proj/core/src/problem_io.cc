// Copyright 2026 The bmsdp Authors
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

#include "bmsdp/problem_io.h"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bmsdp/error.h"

namespace bmsdp {
namespace {

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Line {
  int number = 0;
  std::vector<std::string_view> tokens;
};

std::vector<std::string_view> Tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Splits into non-empty, comment-stripped lines. A comment line of the form
// "name <text> sets *name.
std::vector<Line> SplitLines(std::string_view text, std::string* name) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::size_t quote = raw.find('"');
    if (quote != std::string_view::npos) {
      std::string_view comment = raw.substr(quote + 1);
      if (name && comment.starts_with("name ")) {
        std::string_view value = comment.substr(5);
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) {
          value.remove_suffix(1);
        }
        *name = std::string(value);
      }
      raw = raw.substr(0, quote);
    }
    Line line{number, Tokenize(raw)};
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
  }
  return lines;
}

long long ParseInt(std::string_view token, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected integer, got '" + std::string(token) + "'");
  }
  return v;
}

double ParseDouble(std::string_view token, int line) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected number, got '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

ConicSdpProblem ReadProblem(std::string_view text) {
  std::string name;
  const std::vector<Line> lines = SplitLines(text, &name);
  std::size_t cursor = 0;
  const int last_line = lines.empty() ? 1 : lines.back().number;
  auto next = [&](const char* what) -> const Line& {
    if (cursor >= lines.size()) {
      throw ParseError(last_line, std::string("unexpected end of input, expected ") + what);
    }
    return lines[cursor++];
  };

  const Line& m_line = next("constraint count");
  if (m_line.tokens.size() != 1) {
    throw ParseError(m_line.number, "constraint count line must hold one integer");
  }
  const long long m = ParseInt(m_line.tokens[0], m_line.number);
  if (m < 0) throw ParseError(m_line.number, "negative constraint count");

  const Line& s_line = next("'nblocks d k'");
  if (s_line.tokens.size() != 3) {
    throw ParseError(s_line.number, "expected 'nblocks d k'");
  }
  const long long nblocks = ParseInt(s_line.tokens[0], s_line.number);
  const long long free_dim = ParseInt(s_line.tokens[1], s_line.number);
  const long long factorized = ParseInt(s_line.tokens[2], s_line.number);
  if (nblocks < 0 || free_dim < 0 || factorized < 0 || factorized > nblocks) {
    throw ParseError(s_line.number,
                     "inconsistent dimension declaration: need 0 <= k <= nblocks, d >= 0");
  }
  if (nblocks == 0 && free_dim == 0) {
    throw ParseError(s_line.number, "inconsistent dimension declaration: no variables");
  }

  BlockStructure structure;
  structure.factorized_count = static_cast<int>(factorized);
  structure.free_dim = static_cast<int>(free_dim);
  if (nblocks > 0) {
    const Line& sizes = next("block sizes");
    if (static_cast<long long>(sizes.tokens.size()) != nblocks) {
      throw ParseError(sizes.number, "inconsistent dimension declaration: expected " +
                                         std::to_string(nblocks) + " block sizes");
    }
    for (std::string_view t : sizes.tokens) {
      const long long n = ParseInt(t, sizes.number);
      if (n <= 0) throw ParseError(sizes.number, "block sizes must be positive");
      structure.psd_sizes.push_back(static_cast<int>(n));
    }
  }

  std::vector<ConstraintKind> kinds;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    const Line& k_line = next("constraint kinds");
    std::string joined;
    for (std::string_view t : k_line.tokens) joined += t;
    if (static_cast<long long>(joined.size()) != m) {
      throw ParseError(k_line.number, "inconsistent dimension declaration: expected " +
                                          std::to_string(m) + " constraint kinds");
    }
    for (char ch : joined) {
      if (ch == 'E' || ch == 'e') {
        kinds.push_back(ConstraintKind::kEquality);
      } else if (ch == 'I' || ch == 'i') {
        kinds.push_back(ConstraintKind::kInequality);
      } else {
        throw ParseError(k_line.number, std::string("unknown constraint kind '") + ch + "'");
      }
    }
    const Line& b_line = next("right-hand side");
    if (static_cast<long long>(b_line.tokens.size()) != m) {
      throw ParseError(b_line.number, "inconsistent dimension declaration: expected " +
                                          std::to_string(m) + " right-hand side values");
    }
    for (long long i = 0; i < m; ++i) b(i) = ParseDouble(b_line.tokens[i], b_line.number);
  }

  ProblemBuilder builder(structure, name);
  for (long long i = 0; i < m; ++i) builder.AddConstraint(kinds[i], b(i));
  // Cost entries are assigned (last wins); constraint entries accumulate.
  Eigen::VectorXd free_cost = Eigen::VectorXd::Zero(free_dim);
  std::vector<Eigen::VectorXd> free_coef(m, Eigen::VectorXd::Zero(free_dim));
  while (cursor < lines.size()) {
    const Line& e = lines[cursor++];
    if (e.tokens.size() != 5) {
      throw ParseError(e.number, "entry lines must read 'con block i j value'");
    }
    const long long con = ParseInt(e.tokens[0], e.number);
    const long long block = ParseInt(e.tokens[1], e.number);
    const long long i = ParseInt(e.tokens[2], e.number);
    const long long j = ParseInt(e.tokens[3], e.number);
    const double value = ParseDouble(e.tokens[4], e.number);
    if (con < 0 || con > m) {
      throw ParseError(e.number, "constraint index " + std::to_string(con) + " out of range");
    }
    if (block < 0 || block > nblocks) {
      throw ParseError(e.number, "unknown block marker " + std::to_string(block));
    }
    if (block == 0) {
      if (free_dim == 0) throw ParseError(e.number, "free entry but d = 0");
      if (i < 1 || i > free_dim) {
        throw ParseError(e.number, "free index " + std::to_string(i) + " out of range");
      }
      if (con == 0) {
        free_cost(i - 1) = value;
      } else {
        free_coef[con - 1](i - 1) += value;
      }
      continue;
    }
    const long long n = structure.psd_sizes[block - 1];
    if (i < 1 || j < 1 || i > n || j > n) {
      throw ParseError(e.number, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") outside block of size " + std::to_string(n));
    }
    if (con == 0) {
      builder.SetCostEntry(static_cast<int>(block - 1), static_cast<int>(i - 1),
                           static_cast<int>(j - 1), value);
    } else {
      builder.AddEntry(static_cast<int>(con - 1), static_cast<int>(block - 1),
                       static_cast<int>(i - 1), static_cast<int>(j - 1), value);
    }
  }
  if (free_dim > 0) {
    builder.SetFreeCost(free_cost);
    for (long long c = 0; c < m; ++c) {
      for (long long i = 0; i < free_dim; ++i) {
        builder.SetFreeCoefficient(static_cast<int>(c), static_cast<int>(i), free_coef[c](i));
      }
    }
  }
  return builder.Build();
}

std::string WriteProblem(const ConicSdpProblem& problem) {
  const BlockStructure& s = problem.structure;
  const int m = problem.num_constraints();
  std::ostringstream out;
  if (!problem.name.empty()) out << "\"name " << problem.name << "\n";
  out << m << "\n";
  out << s.num_blocks() << " " << s.free_dim << " " << s.factorized_count << "\n";
  if (s.num_blocks() > 0) {
    for (int j = 0; j < s.num_blocks(); ++j) out << (j ? " " : "") << s.psd_sizes[j];
    out << "\n";
  }
  if (m > 0) {
    for (const Constraint& c : problem.constraints) {
      out << (c.kind == ConstraintKind::kEquality ? 'E' : 'I');
    }
    out << "\n";
    for (int i = 0; i < m; ++i) {
      out << (i ? " " : "") << FormatDouble(problem.constraints[i].rhs);
    }
    out << "\n";
  }
  for (int i = 0; i < s.free_dim; ++i) {
    if (problem.cost.free(i) != 0.0) {
      out << "0 0 " << i + 1 << " 1 " << FormatDouble(problem.cost.free(i)) << "\n";
    }
  }
  for (int j = 0; j < s.num_blocks(); ++j) {
    const SymmetricMatrix& c = problem.cost.blocks[j];
    for (int col = 0; col < c.dim(); ++col) {
      for (int row = 0; row <= col; ++row) {
        if (c(row, col) != 0.0) {
          out << "0 " << j + 1 << " " << row + 1 << " " << col + 1 << " "
              << FormatDouble(c(row, col)) << "\n";
        }
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    const Constraint& c = problem.constraints[i];
    for (int f = 0; f < c.free.size(); ++f) {
      if (c.free(f) != 0.0) {
        out << i + 1 << " 0 " << f + 1 << " 1 " << FormatDouble(c.free(f)) << "\n";
      }
    }
    for (int j = 0; j < static_cast<int>(c.blocks.size()); ++j) {
      for (const SparseEntry& e : c.blocks[j].entries()) {
        out << i + 1 << " " << j + 1 << " " << e.row + 1 << " " << e.col + 1 << " "
            << FormatDouble(e.value) << "\n";
      }
    }
  }
  return out.str();
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConicSdpProblem ReadProblemFile(const std::string& path) {
  return ReadProblem(ReadTextFile(path));
}

void WriteProblemFile(const ConicSdpProblem& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  out << WriteProblem(problem);
}

FactorizedPoint ReadPoint(std::string_view text,
                          const BlockStructure& structure) {
  std::vector<std::pair<int, std::string_view>> tokens;
  for (const Line& line : SplitLines(text, nullptr)) {
    for (std::string_view t : line.tokens) tokens.emplace_back(line.number, t);
  }
  std::size_t cursor = 0;
  auto next = [&]() -> std::pair<int, std::string_view> {
    if (cursor >= tokens.size()) {
      throw ParseError(tokens.empty() ? 1 : tokens.back().first,
                       "unexpected end of point file");
    }
    return tokens[cursor++];
  };
  auto next_int = [&] {
    auto [line, t] = next();
    return ParseInt(t, line);
  };
  auto next_double = [&] {
    auto [line, t] = next();
    return ParseDouble(t, line);
  };

  const long long nblocks = next_int();
  const long long free_dim = next_int();
  if (nblocks != structure.num_blocks() || free_dim != structure.free_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "point layout does not match problem: expected " +
                    std::to_string(structure.num_blocks()) + " blocks and d = " +
                    std::to_string(structure.free_dim));
  }
  FactorizedPoint point;
  for (int j = 0; j < structure.num_blocks(); ++j) {
    const long long rows = next_int();
    const long long cols = next_int();
    const int n = structure.psd_sizes[j];
    const bool factorized = structure.is_factorized(j);
    if (rows != n || cols < 1 || (!factorized && cols != n)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "block " + std::to_string(j + 1) + " has shape " + std::to_string(rows) +
                      "x" + std::to_string(cols) + ", expected " + std::to_string(n) +
                      (factorized ? "xp" : "x" + std::to_string(n)));
    }
    Eigen::MatrixXd mat(rows, cols);
    for (long long r = 0; r < rows; ++r) {
      for (long long c = 0; c < cols; ++c) mat(r, c) = next_double();
    }
    if (factorized) {
      point.factors.push_back(std::move(mat));
    } else {
      point.tail_blocks.push_back(SymmetricMatrix::FromDense(0.5 * (mat + mat.transpose())));
    }
  }
  point.free.resize(free_dim);
  for (long long i = 0; i < free_dim; ++i) point.free(i) = next_double();
  if (cursor != tokens.size()) {
    throw ParseError(tokens[cursor].first, "trailing data in point file");
  }
  return point;
}

std::string WritePoint(const FactorizedPoint& point) {
  std::ostringstream out;
  out << point.factors.size() + point.tail_blocks.size() << " " << point.free.size() << "\n";
  auto write_matrix = [&](const Eigen::MatrixXd& mat) {
    out << mat.rows() << " " << mat.cols() << "\n";
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) {
        out << (c ? " " : "") << FormatDouble(mat(r, c));
      }
      out << "\n";
    }
  };
  for (const Eigen::MatrixXd& y : point.factors) write_matrix(y);
  for (const SymmetricMatrix& x : point.tail_blocks) write_matrix(x.ToDense());
  for (Eigen::Index i = 0; i < point.free.size(); ++i) {
    out << (i ? " " : "") << FormatDouble(point.free(i));
  }
  if (point.free.size() > 0) out << "\n";
  return out.str();
}

}  // namespace bmsdp
