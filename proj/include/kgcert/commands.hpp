/*
 * Copyright 2026 the kgcert authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KGCERT_COMMANDS_HPP_
#define KGCERT_COMMANDS_HPP_

#include <string>
#include <vector>

#include "kgcert/config.hpp"

namespace kgcert {

// Batch entry points. Each validates its configuration, echoes the resolved
// settings, runs, and writes outputs plus a manifest under `out_dir`.
// Returns the process exit code (0 ok, 1 validation error, 2 runtime error);
// validation failures are reported by throwing ConfigError.
int cmd_train(KeyValueConfig config);
int cmd_eval(KeyValueConfig config);
int cmd_certify(KeyValueConfig config);
int cmd_multihop(KeyValueConfig config);
int cmd_grid(KeyValueConfig config);

// Full CLI: subcommand, --config PATH, then key=value overrides. Maps
// exceptions to exit codes.
int run_cli(const std::vector<std::string>& args);

}  // namespace kgcert

#endif  // KGCERT_COMMANDS_HPP_
