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

#ifndef BMSDP_TOOLS_CLI_JSON_WRITER_H_
#define BMSDP_TOOLS_CLI_JSON_WRITER_H_

#include <string>

#include "json.hpp"

namespace bmsdp::cli {

using Json = nlohmann::ordered_json;

// Serializes with two-space indentation and every floating-point number
// printed as %.17g, so equal values always give equal bytes. Non-finite
// numbers become null.
std::string DumpJson(const Json& value);

}  // namespace bmsdp::cli

#endif  // BMSDP_TOOLS_CLI_JSON_WRITER_H_
