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

#ifndef BMSDP_PROBLEM_IO_H_
#define BMSDP_PROBLEM_IO_H_

#include <string>
#include <string_view>

#include "bmsdp/factorization.h"
#include "bmsdp/model.h"

namespace bmsdp {

// Line-oriented sparse text format:
//
//   "name <problem name>          (optional comment carrying the name)
//   m
//   nblocks d k
//   n_1 ... n_l                    (omitted when nblocks = 0)
//   EEII...                        (omitted when m = 0)
//   b_1 ... b_m                    (omitted when m = 0)
//   con block i j value            (repeated; con 0 = cost, block 0 = free)
//
// Indices are 1-based and only i <= j is stored. Lines starting with '"'
// are comments.
ConicSdpProblem ReadProblem(std::string_view text);
std::string WriteProblem(const ConicSdpProblem& problem);

ConicSdpProblem ReadProblemFile(const std::string& path);
void WriteProblemFile(const ConicSdpProblem& problem, const std::string& path);

// Point files: "nblocks d", then for every block a "rows cols" line followed
// by the matrix in row-major order (Y_j for factorized blocks, X_j for tail
// blocks), then the d free values.
FactorizedPoint ReadPoint(std::string_view text,
                          const BlockStructure& structure);
std::string WritePoint(const FactorizedPoint& point);

std::string ReadTextFile(const std::string& path);

}  // namespace bmsdp

#endif  // BMSDP_PROBLEM_IO_H_
