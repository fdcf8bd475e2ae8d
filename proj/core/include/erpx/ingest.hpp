#ifndef ERPX_INGEST_HPP
#define ERPX_INGEST_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx {
namespace io {

// A named preprocessing step applied after load, in order.
struct TransformStep {
  std::string name;   // "log_offset" (param = offset) | "top_variance" (param = k)
  double param = 0.0;
};

struct IngestOptions {
  std::string response_column = "y";          // header name of the response
  std::vector<int> drop_rows;                 // 0-based row indices, applied after load
  std::map<std::string, FeatureKind> kind_overrides;  // by feature name
  std::vector<TransformStep> transforms;
};

// Comma-delimited, header row required, '.' decimal separator, UTF-8.
// Missing or non-numeric cells are data errors naming the row and column.
Dataset load_csv(const std::filesystem::path& path, const IngestOptions& options = {});

// Round-trips in-range IEEE doubles (17 significant digits).
void save_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                      const std::string& response_name = "y");

// Feature-only matrix CSV (no response column); may have zero rows.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* column_names = nullptr);
void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& X,
                     std::span<const std::string> column_names);

Dataset drop_rows(const Dataset& data, std::span<const int> row_indices);

// Natural log of y + offset; every shifted value must be positive.
Eigen::VectorXd log_offset_transform(const Eigen::VectorXd& y, double offset);

// Keeps the k features with the largest sample variance; ties keep the
// earlier column.
Dataset top_variance_filter(const Dataset& data, int k);

// Disjoint, exhaustive, seeded random split into (train, test).
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, int n_train, Seed seed);

}  // namespace io
}  // namespace erpx

#endif
