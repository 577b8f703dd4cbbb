#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synphi/integration_measures.hpp"

namespace synphi {

enum class Suite { Table1, Figure2, Appendix4, AppendixE };
enum class Format { Csv, Json, Markdown };

std::optional<Suite> parse_suite(std::string_view s);
const char* to_string(Suite s);

struct Cell {
  std::optional<double> value;  // nullopt renders as an em dash
  bool bounded = false;
  bool infinite = false;
  int clamp_count = 0;
  int over_bound_count = 0;
  std::string error;  // non-empty renders as ERR
};

struct Column {
  std::string key;     // stable machine name, used by JSON and --check
  std::string header;  // display header
};

struct TableRow {
  std::string network;
  std::vector<Cell> cells;
};

struct Table {
  Suite suite = Suite::Table1;
  std::vector<Column> columns;
  std::vector<TableRow> rows;

  bool has_errors() const;
};

// Legacy columns (out-of-scope definitions) come from a sidecar file with
// lines `network,column,value`; columns are phi2008, phi2014, phi2025.
using Sidecar = std::map<std::string, std::map<std::string, double>>;
Sidecar parse_sidecar(std::string_view text);

struct ReportOptions {
  double tol = 1e-9;
  long max_iterations = 100000;
  Sidecar sidecar;
  unsigned threads = 0;  // 0 = hardware concurrency
};

std::vector<std::string> suite_networks(Suite s);
Table run_suite(Suite suite, const ReportOptions& opts = {});

// Half-even rounding to 3 decimals; "-0.000" is folded to "0.000".
std::string round3(double v);
std::string render_cell(const Cell& c);
std::string render(const Table& t, Format f);

// Published reference values, keyed network -> column key.
const std::map<std::string, std::map<std::string, double>>& reference_values(Suite s);

struct CheckOutcome {
  std::string network;
  std::string column;
  double expected = 0;
  std::optional<double> actual;
  bool pass = false;
  bool excluded = false;  // topology gate failed for this row
};

// Compares every published cell to ±tol. For figure2 / appendix4 the φ columns
// are only compared once the ID and I(A;S) cells of that row match.
std::vector<CheckOutcome> check_table(const Table& t, double tol = 1e-3);

}  // namespace synphi
