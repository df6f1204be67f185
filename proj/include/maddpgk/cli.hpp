// Copyright 2026 The maddpgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MADDPGK_CLI_HPP_
#define MADDPGK_CLI_HPP_

#include <ostream>

namespace maddpgk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `maddpgk` tool: training, scaling benchmark or log
// aggregation depending on the flags.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace maddpgk

#endif  // MADDPGK_CLI_HPP_
