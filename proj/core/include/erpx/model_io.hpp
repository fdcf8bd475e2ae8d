#ifndef ERPX_MODEL_IO_HPP
#define ERPX_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "erpx/formation.hpp"

namespace erpx {
namespace io {

// JSON model artifact. Doubles round-trip exactly; loading a saved model
// reproduces predictions bit for bit.
struct ModelArtifact {
  ErpxModel model;
  std::vector<std::string> feature_names;  // training schema, for column matching
  Seed root_seed = 0;
  std::string config_hash;
  std::string tool_version;
};

void save_model_json(const std::filesystem::path& path, const ModelArtifact& artifact);
ModelArtifact load_model_json(const std::filesystem::path& path);

}  // namespace io
}  // namespace erpx

#endif
