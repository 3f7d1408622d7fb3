#pragma once

#include "weekcast/nn/network.hpp"

#include "json.hpp"
#include <string>
#include <string_view>

namespace weekcast::nn {

/// {"<layer id>": {"weight": {"shape": [...], "values": [...]}, "bias": {...}}, ...}
nlohmann::json params_to_json(const Params& params);
/// Layer order follows the document's key order as written by params_to_json.
Params params_from_json(const nlohmann::json& doc);

// Binary layout, little-endian host order:
//   magic "WKPARAM1", u64 layer count, then per layer:
//   u64 id length, id bytes, then weight and bias each as
//   u64 rank, rank x u64 dims, element count x f64 values.
std::string params_to_binary(const Params& params);
/// Throws DataError on truncated or malformed input.
Params params_from_binary(std::string_view bytes);

} // namespace weekcast::nn
