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

#ifndef BMSDP_TOOLS_CLI_COMMANDS_H_
#define BMSDP_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "bmsdp/model.h"
#include "cli/json_writer.h"

namespace bmsdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIndeterminate = 2;
inline constexpr int kExitInfeasible = 3;

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;       // JSON document (empty on usage errors)
  std::string diagnostics;  // for stderr
};

struct SolveFlags {
  std::optional<int> rank;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_outer = 50;
  int restarts = 3;
  bool oracle = false;
  bool timing = false;
};

struct BoundFlags {
  std::optional<std::string> ranks;  // "0,1;1": one comma list per tail block
  int cap = 20;
};

struct ExperimentFlags {
  std::string kind;  // genericity | adversarial | licq
  int n = 12;
  int m = 8;
  std::optional<int> p;
  int trials = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool oracle = true;
};

struct GenerateFlags {
  std::string kind;  // random | sensing-psd | sensing-symmetric | adversarial | iqm | soc
  int n = 6;
  int m = 4;
  int rank = 1;
  std::uint64_t seed = 0;
  std::string blocks;  // "4,3" for random; defaults to n
  int factorized = 1;
  int free_dim = 0;
  int cone_dim = 3;
  std::string kinds;
  std::optional<std::string> fixture_path;
};

ConicSdpProblem LoadProblem(const std::string& path);

Json ProblemSummary(const ConicSdpProblem& problem);

CommandResult RunSolve(const ConicSdpProblem& problem, const SolveFlags& flags);
CommandResult RunCertify(const ConicSdpProblem& problem, const std::string& point_text);
CommandResult RunBound(const ConicSdpProblem& problem, const BoundFlags& flags);
CommandResult RunExperiment(const ExperimentFlags& flags);
// output holds the problem file; the sidecar fixture JSON is written to
// flags.fixture_path when set.
CommandResult RunGenerate(const GenerateFlags& flags);

// Full command line entry point: parses argv, dispatches, writes the JSON
// to --out or `out`, diagnostics to `err`, and returns the exit code.
int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bmsdp::cli

#endif  // BMSDP_TOOLS_CLI_COMMANDS_H_
