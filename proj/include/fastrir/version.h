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

#ifndef FASTRIR_VERSION_H_
#define FASTRIR_VERSION_H_

namespace fastrir {

inline constexpr const char* kVersion = "1.0.0";
// Bumped whenever the CLI flags or the JSON/CSV/WAV/checkpoint formats change
// incompatibly; scripting clients compare it before running.
inline constexpr int kInterfaceVersion = 1;

}  // namespace fastrir

#endif  // FASTRIR_VERSION_H_
