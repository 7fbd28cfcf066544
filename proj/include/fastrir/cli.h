// Copyright 2026 The fastrir Authors. All Rights Reserved.
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

#ifndef FASTRIR_CLI_H_
#define FASTRIR_CLI_H_

namespace fastrir::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the fastrir binary. Subcommands: gen-corpus, train, infer,
// eval-t60, bench, reverb, split, version.
int run(int argc, const char* const* argv);

}  // namespace fastrir::cli

#endif  // FASTRIR_CLI_H_
