#include "erpx/ingest.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "erpx/errors.hpp"

namespace erpx {
namespace io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& column) {
  const std::string cell = trim(raw);
  if (cell.empty())
    throw DataError("csv: missing value at row " + std::to_string(row + 1) + ", column '" +
                    column + "'");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(value))
    throw DataError("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row + 1) +
                    ", column '" + column + "'");
  return value;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

RawTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: '" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  RawTable table;
  table.header = split_csv_line(line);
  for (std::string& h : table.header) h = trim(h);
  if (table.header.empty()) throw DataError("csv: header row has no columns");

  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw DataError("csv: row " + std::to_string(row_index + 1) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(table.header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_cell(cells[c], row_index, table.header[c]);
    table.rows.push_back(std::move(row));
    ++row_index;
  }
  return table;
}

std::string format_value(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

Dataset apply_transforms(Dataset data, const std::vector<TransformStep>& steps) {
  for (const TransformStep& step : steps) {
    if (step.name == "log_offset") {
      data = Dataset(log_offset_transform(data.y(), step.param), data.X(), data.feature_names(),
                     data.feature_kinds());
    } else if (step.name == "top_variance") {
      data = top_variance_filter(data, static_cast<int>(step.param));
    } else {
      throw DataError("ingest: unknown transform '" + step.name + "'");
    }
  }
  return data;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const IngestOptions& options) {
  const RawTable table = read_table(path);

  const auto response_it =
      std::find(table.header.begin(), table.header.end(), options.response_column);
  if (response_it == table.header.end())
    throw DataError("csv: response column '" + options.response_column + "' not found in '" +
                    path.string() + "'");
  const auto response_index =
      static_cast<std::size_t>(std::distance(table.header.begin(), response_it));

  const std::size_t n = table.rows.size();
  const std::size_t d = table.header.size() - 1;
  if (d == 0) throw DataError("csv: no feature columns besides the response");

  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::string> names;
  names.reserve(d);
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != response_index) names.push_back(table.header[c]);

  for (std::size_t r = 0; r < n; ++r) {
    y[static_cast<Eigen::Index>(r)] = table.rows[r][response_index];
    std::size_t out = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == response_index) continue;
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out)) = table.rows[r][c];
      ++out;
    }
  }

  Dataset data = Dataset::infer(std::move(y), std::move(X), std::move(names));

  if (!options.kind_overrides.empty()) {
    std::vector<FeatureKind> kinds = data.feature_kinds();
    for (std::size_t j = 0; j < data.feature_names().size(); ++j) {
      const auto it = options.kind_overrides.find(data.feature_names()[j]);
      if (it != options.kind_overrides.end()) kinds[j] = it->second;
    }
    data = Dataset(data.y(), data.X(), data.feature_names(), std::move(kinds));
  }

  if (!options.drop_rows.empty()) data = drop_rows(data, options.drop_rows);
  return apply_transforms(std::move(data), options.transforms);
}

void save_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                      const std::string& response_name) {
  std::ofstream out(path);
  if (!out) throw DataError("csv: cannot write '" + path.string() + "'");
  out << response_name;
  for (const std::string& name : data.feature_names()) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    out << format_value(data.y()[i]);
    for (Eigen::Index j = 0; j < data.n_features(); ++j) out << ',' << format_value(data.X()(i, j));
    out << '\n';
  }
  if (!out) throw DataError("csv: write to '" + path.string() + "' failed");
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* column_names) {
  const RawTable table = read_table(path);
  if (column_names != nullptr) *column_names = table.header;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < table.header.size(); ++c)
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = table.rows[r][c];
  return X;
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& X,
                     std::span<const std::string> column_names) {
  if (static_cast<Eigen::Index>(column_names.size()) != X.cols())
    throw ContractViolation("save_matrix_csv: column name count mismatch");
  std::ofstream out(path);
  if (!out) throw DataError("csv: cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < column_names.size(); ++c)
    out << (c == 0 ? "" : ",") << column_names[c];
  out << '\n';
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) out << (j == 0 ? "" : ",") << format_value(X(i, j));
    out << '\n';
  }
  if (!out) throw DataError("csv: write to '" + path.string() + "' failed");
}

Dataset drop_rows(const Dataset& data, std::span<const int> row_indices) {
  if (row_indices.empty())
    return data;
  std::set<int> drop;
  for (int idx : row_indices) {
    if (idx < 0 || idx >= data.n_rows())
      throw ContractViolation("drop_rows: row index " + std::to_string(idx) + " out of range");
    drop.insert(idx);
  }
  const auto kept = static_cast<Eigen::Index>(data.n_rows() - static_cast<Eigen::Index>(drop.size()));
  Eigen::VectorXd y(kept);
  Eigen::MatrixXd X(kept, data.n_features());
  Eigen::Index out = 0;
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    if (drop.count(static_cast<int>(i)) != 0) continue;
    y[out] = data.y()[i];
    X.row(out) = data.X().row(i);
    ++out;
  }
  return Dataset(std::move(y), std::move(X), data.feature_names(), data.feature_kinds());
}

Eigen::VectorXd log_offset_transform(const Eigen::VectorXd& y, double offset) {
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double shifted = y[i] + offset;
    if (!(shifted > 0.0))
      throw DataError("log_offset_transform: y[" + std::to_string(i) + "] + offset = " +
                      std::to_string(shifted) + " is not positive");
    out[i] = std::log(shifted);
  }
  return out;
}

Dataset top_variance_filter(const Dataset& data, int k) {
  if (k < 1 || k > data.n_features())
    throw ContractViolation("top_variance_filter: k must be in [1, D]");
  if (k == data.n_features()) return data;

  const Eigen::Index n = data.n_rows();
  std::vector<std::pair<double, int>> ranked;  // (-variance, column) for stable ordering
  ranked.reserve(static_cast<std::size_t>(data.n_features()));
  for (Eigen::Index j = 0; j < data.n_features(); ++j) {
    const double mean = data.X().col(j).mean();
    const double var =
        (data.X().col(j).array() - mean).square().sum() / static_cast<double>(n - 1);
    ranked.emplace_back(-var, static_cast<int>(j));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) keep.push_back(ranked[static_cast<std::size_t>(r)].second);
  std::sort(keep.begin(), keep.end());  // preserve original column order

  Eigen::MatrixXd X(n, k);
  std::vector<std::string> names;
  std::vector<FeatureKind> kinds;
  names.reserve(static_cast<std::size_t>(k));
  kinds.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    X.col(c) = data.X().col(keep[static_cast<std::size_t>(c)]);
    names.push_back(data.feature_names()[static_cast<std::size_t>(keep[static_cast<std::size_t>(c)])]);
    kinds.push_back(data.feature_kinds()[static_cast<std::size_t>(keep[static_cast<std::size_t>(c)])]);
  }
  return Dataset(data.y(), std::move(X), std::move(names), std::move(kinds));
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, int n_train, Seed seed) {
  if (n_train < 2 || n_train >= data.n_rows())
    throw ContractViolation("train_test_split: n_train must be in [2, n)");
  std::vector<int> order(static_cast<std::size_t>(data.n_rows()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);

  std::vector<int> test_rows(order.begin() + n_train, order.end());
  std::vector<int> train_rows(order.begin(), order.begin() + n_train);
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  // drop_rows keeps the complement, preserving row order.
  Dataset train = drop_rows(data, test_rows);
  Dataset test = drop_rows(data, train_rows);
  return {std::move(train), std::move(test)};
}

}  // namespace io
}  // namespace erpx
