#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flowguard/gnn/model.hpp"

namespace flowguard::gnn {

inline constexpr int kCheckpointVersion = 1;

// JSON container: format tag, version, model config, init seed, the input
// feature columns the model was trained on, and row-major float64 tensors.
struct Checkpoint {
  ModelParams params;
  // Indices into the 8-column feature layout, in model input order.
  std::vector<int> feature_columns;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
// Validates tensor names and shapes against the stored config; throws
// ParseError / SchemaError / ShapeError.
Checkpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace flowguard::gnn
