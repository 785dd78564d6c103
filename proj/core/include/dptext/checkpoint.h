//
// Copyright 2026 The DPText Authors
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

#ifndef DPTEXT_CHECKPOINT_H_
#define DPTEXT_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dptext/numerics.h"

namespace dptext {

struct TensorRecord {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<double> data;

  bool operator==(const TensorRecord&) const = default;
};

// Versioned JSON checkpoint. Doubles are written in a round-trip-exact form,
// so save/load reproduces every weight bit for bit.
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::string kind;
  uint64_t seed = 0;
  std::map<std::string, std::string> meta;
  std::vector<TensorRecord> tensors;

  const TensorRecord& Find(std::string_view name) const;
  const std::string& Meta(std::string_view key) const;

  bool operator==(const Checkpoint&) const = default;
};

template <typename P>
void AppendParams(Checkpoint& ckpt, std::string_view prefix, const P& params) {
  ForEachParam(params, [&](std::string_view name, const auto& t) {
    TensorRecord rec;
    rec.name = std::string(prefix) + "." + std::string(name);
    rec.rows = t.rows();
    rec.cols = t.cols();
    rec.data.assign(t.data(), t.data() + t.size());
    ckpt.tensors.push_back(std::move(rec));
  });
}

// Resizes every tensor of `params` to the recorded shape and copies values.
template <typename P>
void RestoreParams(const Checkpoint& ckpt, std::string_view prefix, P& params) {
  ForEachParam(params, [&](std::string_view name, auto& t) {
    const TensorRecord& rec =
        ckpt.Find(std::string(prefix) + "." + std::string(name));
    if constexpr (std::decay_t<decltype(t)>::ColsAtCompileTime == 1) {
      if (rec.cols != 1) {
        throw Error(ErrorCode::kIntegrity, rec.name + " is not a vector");
      }
      t.resize(rec.rows);
    } else {
      t.resize(rec.rows, rec.cols);
    }
    if (static_cast<Eigen::Index>(rec.data.size()) != t.size()) {
      throw Error(ErrorCode::kIntegrity, rec.name + " has wrong element count");
    }
    std::copy(rec.data.begin(), rec.data.end(), t.data());
  });
}

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(std::string_view text);
void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace dptext

#endif  // DPTEXT_CHECKPOINT_H_
