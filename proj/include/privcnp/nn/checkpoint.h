//
// Copyright 2026 The privcnp Authors
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
//

// Parameter checkpoints: a JSON manifest (names, shapes, dtype "f64", byte
// offsets) next to one blob of little-endian IEEE-754 doubles.

#ifndef PRIVCNP_NN_CHECKPOINT_H_
#define PRIVCNP_NN_CHECKPOINT_H_

#include <filesystem>

#include "json.hpp"
#include "privcnp/nn/params.h"

namespace privcnp::nn {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kBlobFile = "params.bin";

// Writes dir/manifest.json and dir/params.bin. extra is stored under
// "config" in the manifest.
void SaveCheckpoint(const std::filesystem::path& dir, const ParamStore& params,
                    const nlohmann::json& extra = nlohmann::json::object());

struct Checkpoint {
  ParamStore params;
  nlohmann::json config;
};

// Throws DataError on a malformed manifest or a blob of the wrong size.
Checkpoint LoadCheckpoint(const std::filesystem::path& dir);

}  // namespace privcnp::nn

#endif  // PRIVCNP_NN_CHECKPOINT_H_
