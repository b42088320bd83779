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

#include "privcnp/nn/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "privcnp/errors.h"

namespace privcnp::nn {
namespace {

using nlohmann::json;

std::uint64_t ToLittle(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xff) << (56 - 8 * i);
    return out;
  }
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& dir, const ParamStore& params,
                    const json& extra) {
  std::filesystem::create_directories(dir);
  json entries = json::array();
  std::ofstream blob(dir / kBlobFile, std::ios::binary);
  if (!blob) throw DataError("cannot write " + (dir / kBlobFile).string());
  std::uint64_t offset = 0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Tensor& t = params.value(p);
    entries.push_back({{"name", params.name(p)},
                       {"shape", t.shape},
                       {"offset", offset},
                       {"count", t.size()}});
    for (double v : t.values) {
      const std::uint64_t bits = ToLittle(std::bit_cast<std::uint64_t>(v));
      char bytes[8];
      std::memcpy(bytes, &bits, 8);
      blob.write(bytes, 8);
    }
    offset += 8 * t.size();
  }
  if (!blob) throw DataError("write failed for " + (dir / kBlobFile).string());
  const json manifest = {{"format", "privcnp-checkpoint"},
                         {"version", 1},
                         {"dtype", "f64"},
                         {"byte_order", "little"},
                         {"blob", kBlobFile},
                         {"total_bytes", offset},
                         {"params", entries},
                         {"config", extra}};
  std::ofstream out(dir / kManifestFile);
  if (!out) throw DataError("cannot write " + (dir / kManifestFile).string());
  out << manifest.dump(2) << '\n';
}

Checkpoint LoadCheckpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestFile);
  if (!in) throw DataError("cannot open " + (dir / kManifestFile).string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint manifest: ") + e.what());
  }
  if (manifest.value("dtype", std::string()) != "f64") {
    throw DataError("checkpoint dtype must be f64");
  }
  const std::string blob_name = manifest.value("blob", std::string(kBlobFile));
  std::ifstream blob(dir / blob_name, std::ios::binary);
  if (!blob) throw DataError("cannot open " + (dir / blob_name).string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(blob)),
                          std::istreambuf_iterator<char>());

  Checkpoint ckpt;
  try {
    for (const json& e : manifest.at("params")) {
      const auto shape = e.at("shape").get<std::vector<std::size_t>>();
      const auto offset = e.at("offset").get<std::uint64_t>();
      const auto count = e.at("count").get<std::uint64_t>();
      if (count != ShapeSize(shape) || offset + 8 * count > bytes.size()) {
        throw DataError("checkpoint entry " + e.at("name").get<std::string>() +
                        " does not fit the blob");
      }
      std::vector<double> values(count);
      for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, bytes.data() + offset + 8 * i, 8);
        values[i] = std::bit_cast<double>(ToLittle(bits));
      }
      ckpt.params.Add(e.at("name").get<std::string>(),
                      Tensor(shape, std::move(values)));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint manifest: ") + e.what());
  }
  ckpt.config = manifest.value("config", json::object());
  return ckpt;
}

}  // namespace privcnp::nn
