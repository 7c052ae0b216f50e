#pragma once

#include <string>

#include "lws/param_store.hpp"

namespace lws {

/// Checkpoint file layout, all integers little-endian:
///   magic "LWSC", version u32, tensor count u32, then per tensor:
///   name length u32, UTF-8 name bytes, rank u32, dims u32[rank],
///   row-major float32 data.
/// Tensors are written in lexicographic name order.
void save_checkpoint(const ParamStore& store, const std::string& path);
ParamStore load_checkpoint(const std::string& path);

constexpr uint32_t kCheckpointVersion = 1;

}  // namespace lws
