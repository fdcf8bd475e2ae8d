#include "erpx/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "erpx/errors.hpp"

namespace erpx {

const char* const kTraceCsvHeader =
    "dataset,base,run,variables,initial_groups,screened_groups,candidate_phalanxes,"
    "final_phalanxes,erpx_mse,base_mse";

namespace {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

std::string trace_row_csv(const TraceRow& row) {
  std::ostringstream out;
  out << row.dataset_id << ',' << row.base_kind << ',' << row.run_index << ',' << row.n_features
      << ',' << row.n_initial << ',' << row.n_screened << ',' << row.n_candidates << ','
      << row.n_final << ',' << format_double(row.erpx_mse) << ',' << format_double(row.base_mse);
  return out.str();
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << kTraceCsvHeader << '\n';
  for (const TraceRow& row : rows) out << trace_row_csv(row) << '\n';
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("trace csv: empty stream");
  if (line != kTraceCsvHeader) throw DataError("trace csv: unexpected header: " + line);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw DataError("trace csv: expected 10 columns, got line: " + line);
    TraceRow row;
    row.dataset_id = cells[0];
    row.base_kind = cells[1];
    row.run_index = std::stoi(cells[2]);
    row.n_features = std::stoi(cells[3]);
    row.n_initial = std::stoi(cells[4]);
    row.n_screened = std::stoi(cells[5]);
    row.n_candidates = std::stoi(cells[6]);
    row.n_final = std::stoi(cells[7]);
    row.erpx_mse = std::stod(cells[8]);
    row.base_mse = std::stod(cells[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace erpx
