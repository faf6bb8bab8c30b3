/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSIM_CLI_HPP_
#define FEDSIM_CLI_HPP_

#include <ostream>

namespace fedsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

// Subcommands: run <config>, sweep <config> [--seeds n], check <config>,
// inspect <log>. Shared flags: --out dir, --seed u64, --quiet, --workers n.
// FEDSIM_OUT in the environment overrides --out.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fedsim

#endif  // FEDSIM_CLI_HPP_
