// Copyright 2026 The Shimguard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHIMGUARD_CLI_H_
#define SHIMGUARD_CLI_H_

#include <iosfwd>
#include <span>
#include <string>

namespace shimguard {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the `shimguard` binary. `args` excludes the program
// name. Only files are read or written; nothing touches a network.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace shimguard

#endif  // SHIMGUARD_CLI_H_
