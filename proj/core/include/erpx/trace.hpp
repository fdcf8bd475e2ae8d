#ifndef ERPX_TRACE_HPP
#define ERPX_TRACE_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace erpx {

// One run of the pipeline, flattened to the columns of the benchmark
// tables: counts per stage plus the two reported training errors.
struct TraceRow {
  std::string dataset_id;
  std::string base_kind;
  int run_index = 0;
  int n_features = 0;    // D
  int n_initial = 0;     // d
  int n_screened = 0;    // s
  int n_candidates = 0;  // e
  int n_final = 0;       // h
  double erpx_mse = 0.0;
  double base_mse = 0.0;
};

extern const char* const kTraceCsvHeader;

std::string trace_row_csv(const TraceRow& row);

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);

std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace erpx

#endif
