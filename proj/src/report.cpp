#include "synphi/report.hpp"

#include <atomic>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace synphi {

namespace {

const std::vector<std::string> kDoublets = {
    "ZERO-ZERO", "KEEP-ZERO", "KEEP-KEEP", "GET-ZERO", "GET-KEEP", "GET-GET", "AND-ZERO", "AND-KEEP",
    "AND-GET",   "AND-AND",   "AND-XOR",   "XOR-ZERO", "XOR-KEEP", "XOR-GET", "XOR-AND",  "XOR-XOR",
};

std::vector<Column> columns_for(Suite s) {
  switch (s) {
    case Suite::Table1:
      return {{"id", "ID[A->S]"},           {"phi2008", "<phi^2008>"},   {"phi2014", "<phi_c^2014>"},
              {"phi2023_c", "<phi_c^2023>"}, {"phi2025", "<phi_c^2025>"}, {"phi_s1_c", "<phi_c^S1>"},
              {"mi", "I(A;S)"},              {"syn_c", "S_c"}};
    case Suite::Figure2:
    case Suite::Appendix4:
      return {{"id", "ID[A->S]"},         {"phi2023_c_min", "min_s phi_c^2023"}, {"phi2023_c_max", "max_s phi_c^2023"},
              {"phi2023_c", "<phi_c^2023>"}, {"phi_s1_c", "<phi_c^S1>"},        {"mi", "I(A;S)"},
              {"syn_c", "S_c"}};
    case Suite::AppendixE:
      return {{"id", "ID[A->S]"},           {"phi2008", "<phi^2008>"}, {"phi2014", "<phi_s^2014>"},
              {"phi2023_s", "<phi_s^2023>"}, {"phi_s1_s", "<phi_s^S1>"}, {"mi", "I(A;S)"},
              {"syn_s", "S_s"}};
  }
  return {};
}

bool is_legacy(const std::string& key) { return key == "phi2008" || key == "phi2014" || key == "phi2025"; }

Cell from_summary(const StateSummary& s, double v) {
  Cell c;
  c.value = v;
  c.bounded = s.diag.bounded;
  c.infinite = s.diag.infinite;
  c.clamp_count = s.diag.clamp_count;
  c.over_bound_count = s.diag.over_bound_count;
  return c;
}

// Lazily computed network quantities shared by the columns of one row.
class RowContext {
 public:
  RowContext(const NetworkSpec& spec, const ReportOptions& opts)
      : tpm_(build_tpm(spec)), triple_(tpm_), opts_(opts) {}

  Cell compute(const std::string& key) {
    const int n = triple_.nodes();
    Cell c;
    if (key == "id") {
      std::map<State, double> v;
      for (State s : triple_.reachable_states()) v[s] = intrinsic_difference(triple_, {past_view(n)}, s);
      c.value = state_expectation(v, triple_);
    } else if (key == "mi") {
      c.value = mutual_information(triple_, {past_view(n)}, {present_view(n)});
    } else if (key == "phi2023_c" || key == "phi2023_c_min" || key == "phi2023_c_max") {
      auto& s = iit4(Side::Cause);
      c = from_summary(s, key == "phi2023_c" ? s.mean : key == "phi2023_c_min" ? s.min : s.max);
    } else if (key == "phi2023_s") {
      auto& s = iit4(Side::Both);
      c = from_summary(s, s.mean);
    } else if (key == "phi_s1_c" || key == "phi_s1_s") {
      auto side = key == "phi_s1_c" ? Side::Cause : Side::Both;
      auto s = expected_at_network_mip(engine(side), MeasureKind::S1);
      c = from_summary(s, s.mean);
    } else if (key == "syn_c" || key == "syn_s") {
      Diagnostics d;
      c.value = network_synergy(engine(key == "syn_c" ? Side::Cause : Side::Both), key == "syn_c" ? Side::Cause : Side::Both, d);
    } else {
      throw std::logic_error("unknown column " + key);
    }
    return c;
  }

 private:
  MeasureEngine& engine(Side side) {
    auto it = engines_.find(side);
    if (it == engines_.end()) {
      MeasureOptions mo;
      mo.tol = opts_.tol;
      mo.max_iterations = opts_.max_iterations;
      mo.side = side;
      it = engines_.emplace(side, std::make_unique<MeasureEngine>(triple_, mo)).first;
    }
    return *it->second;
  }
  const StateSummary& iit4(Side side) {
    auto it = iit4_.find(side);
    if (it == iit4_.end())
      it = iit4_.emplace(side, expected_at_state_mip(engine(side), MeasureKind::IIT4, Normalization::Normalized)).first;
    return it->second;
  }

  TransitionModel tpm_;
  CausalTriple triple_;
  const ReportOptions& opts_;
  std::map<Side, std::unique_ptr<MeasureEngine>> engines_;
  std::map<Side, StateSummary> iit4_;
};

TableRow compute_row(const std::string& name, const std::vector<Column>& cols, const ReportOptions& opts) {
  TableRow row;
  row.network = name;
  auto spec = find_builtin(name);
  std::optional<RowContext> ctx;
  std::string setup_error;
  try {
    if (!spec) throw std::invalid_argument("unknown network " + name);
    ctx.emplace(*spec, opts);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  for (auto& col : cols) {
    Cell cell;
    if (is_legacy(col.key)) {
      if (auto it = opts.sidecar.find(name); it != opts.sidecar.end())
        if (auto jt = it->second.find(col.key); jt != it->second.end()) cell.value = jt->second;
    } else if (!setup_error.empty()) {
      cell.error = setup_error;
    } else {
      try {
        cell = ctx->compute(col.key);
      } catch (const std::exception& e) {
        cell = Cell{};
        cell.error = e.what();
      }
    }
    row.cells.push_back(std::move(cell));
  }
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::optional<Suite> parse_suite(std::string_view s) {
  if (s == "table1") return Suite::Table1;
  if (s == "figure2") return Suite::Figure2;
  if (s == "appendix4") return Suite::Appendix4;
  if (s == "appendixE") return Suite::AppendixE;
  return std::nullopt;
}

const char* to_string(Suite s) {
  switch (s) {
    case Suite::Table1: return "table1";
    case Suite::Figure2: return "figure2";
    case Suite::Appendix4: return "appendix4";
    case Suite::AppendixE: return "appendixE";
  }
  return "?";
}

bool Table::has_errors() const {
  for (auto& r : rows)
    for (auto& c : r.cells)
      if (!c.error.empty()) return true;
  return false;
}

Sidecar parse_sidecar(std::string_view text) {
  Sidecar out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',')) {
      auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
      f.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
    }
    if (f.size() != 3) throw std::invalid_argument("sidecar line " + std::to_string(lineno) + ": expected network,column,value");
    if (!is_legacy(f[1])) throw std::invalid_argument("sidecar line " + std::to_string(lineno) + ": unknown column '" + f[1] + "'");
    try {
      std::size_t used = 0;
      double v = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("trailing characters");
      out[f[0]][f[1]] = v;
    } catch (const std::exception&) {
      throw std::invalid_argument("sidecar line " + std::to_string(lineno) + ": bad value '" + f[2] + "'");
    }
  }
  return out;
}

std::vector<std::string> suite_networks(Suite s) {
  switch (s) {
    case Suite::Table1: return kDoublets;
    case Suite::Figure2: return {"GET3", "111", "121", "123"};
    case Suite::Appendix4: return {"GET4", "4422", "4322", "4321"};
    case Suite::AppendixE: {
      auto v = kDoublets;
      for (auto n : {"GET3", "111", "121", "123"}) v.push_back(n);
      return v;
    }
  }
  return {};
}

Table run_suite(Suite suite, const ReportOptions& opts) {
  Table t;
  t.suite = suite;
  t.columns = columns_for(suite);
  auto names = suite_networks(suite);
  t.rows.resize(names.size());
  unsigned threads = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(names.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < names.size(); i = next++) t.rows[i] = compute_row(names[i], t.columns, opts);
    });
  for (auto& th : pool) th.join();
  return t;
}

std::string round3(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  double r = std::nearbyint(v * 1000.0);
  std::fesetround(saved);
  if (r == 0) r = 0;  // fold -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", r / 1000.0);
  return buf;
}

std::string render_cell(const Cell& c) {
  if (!c.error.empty()) return "ERR";
  if (!c.value) return "—";
  std::string s = round3(*c.value);
  if (c.bounded) s += "*";
  return s;
}

std::string render(const Table& t, Format f) {
  std::ostringstream out;
  bool any_bounded = false;
  for (auto& r : t.rows)
    for (auto& c : r.cells) any_bounded = any_bounded || c.bounded;

  if (f == Format::Csv) {
    out << "network";
    for (auto& col : t.columns) out << ',' << csv_field(col.header);
    out << '\n';
    for (auto& r : t.rows) {
      out << csv_field(r.network);
      for (auto& c : r.cells) out << ',' << csv_field(render_cell(c));
      out << '\n';
    }
  } else if (f == Format::Markdown) {
    out << "| Network |";
    for (auto& col : t.columns) out << ' ' << col.header << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << "---:|";
    out << '\n';
    for (auto& r : t.rows) {
      out << "| " << r.network << " |";
      for (auto& c : r.cells) out << ' ' << render_cell(c) << " |";
      out << '\n';
    }
    if (any_bounded) out << "\n`*` proxy upper bound (bounded=true)\n";
  } else {
    nlohmann::ordered_json j;
    j["suite"] = to_string(t.suite);
    j["columns"] = nlohmann::ordered_json::array();
    for (auto& col : t.columns) j["columns"].push_back({{"key", col.key}, {"header", col.header}});
    j["rows"] = nlohmann::ordered_json::array();
    for (auto& r : t.rows) {
      nlohmann::ordered_json row;
      row["network"] = r.network;
      nlohmann::ordered_json cells = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        const auto& c = r.cells[i];
        nlohmann::ordered_json cell;
        cell["value"] = c.value && std::isfinite(*c.value) ? nlohmann::ordered_json(*c.value) : nlohmann::ordered_json(nullptr);
        cell["display"] = render_cell(c);
        cell["bounded"] = c.bounded;
        cell["infinite"] = c.infinite;
        cell["clamp_count"] = c.clamp_count;
        cell["over_bound_count"] = c.over_bound_count;
        if (!c.error.empty()) cell["error"] = c.error;
        cells[t.columns[i].key] = std::move(cell);
      }
      row["cells"] = std::move(cells);
      j["rows"].push_back(std::move(row));
    }
    out << j.dump(2) << '\n';
  }
  return out.str();
}

const std::map<std::string, std::map<std::string, double>>& reference_values(Suite s) {
  using Ref = std::map<std::string, std::map<std::string, double>>;
  // Columns: id, phi2023_c, phi_s1_c, mi, syn_c.
  static const Ref table1 = [] {
    const double rows[16][5] = {
        {0, 0, 0, 0, 0},          {0.5, 0, 0, 1.0, 0},       {2.0, 0, 0, 2.0, 0},         {0.5, 0, 0, 1.0, 0},
        {0.5, 0, 0, 1.0, 0},      {2.0, 2.0, 0, 2.0, 0},     {0.604, 0, 0.354, 0.811, 0.5}, {1.25, 0, 0, 1.5, 0},
        {1.25, 0.75, 0, 1.5, 0},  {0.604, 0.5, 0.354, 0.811, 0.5}, {1.25, 0.5, 0.75, 1.5, 1.0}, {0.5, 0, 0.5, 1.0, 1.0},
        {2.0, 0, 0, 2.0, 0},      {2.0, 2.0, 0, 2.0, 0},     {1.25, 0.5, 0.75, 1.5, 1.0},   {0.5, 1.0, 0.5, 1.0, 1.0},
    };
    Ref r;
    for (std::size_t i = 0; i < kDoublets.size(); ++i)
      r[kDoublets[i]] = {{"id", rows[i][0]}, {"phi2023_c", rows[i][1]}, {"phi_s1_c", rows[i][2]}, {"mi", rows[i][3]}, {"syn_c", rows[i][4]}};
    return r;
  }();
  // Columns: id, min, max, mean phi_c^2023, phi_s1_c, mi, syn_c.
  static const auto multi = [](std::vector<std::pair<std::string, std::vector<double>>> rows) {
    Ref r;
    for (auto& [name, v] : rows)
      r[name] = {{"id", v[0]}, {"phi2023_c_min", v[1]}, {"phi2023_c_max", v[2]}, {"phi2023_c", v[3]},
                 {"phi_s1_c", v[4]}, {"mi", v[5]}, {"syn_c", v[6]}};
    return r;
  };
  static const Ref figure2 = multi({{"GET3", {3.0, 2.0, 2.0, 2.0, 0, 3.0, 0}},
                                    {"111", {0.399, 0, 6.0, 0.75, 0.149, 0.544, 0.25}},
                                    {"121", {0.677, 0, 0.415, 0.052, 0.426, 1.406, 0.75}},
                                    {"123", {1.104, 0, 0, 0, 0.604, 1.811, 1.0}}});
  static const Ref appendix4 = multi({{"GET4", {4.0, 2.0, 2.0, 2.0, 0, 4.0, 0}},
                                      {"4422", {0.397, 0, 0, 0, 0.198, 1.198, 0.5}},
                                      {"4322", {0.568, 0, 0, 0, 0.369, 1.805, 0.875}},
                                      {"4321", {0.838, 0, 0, 0, 0.455, 2.031, 1.0}}});
  // Columns: id, phi2023_s, phi_s1_s, mi, syn_s.
  static const Ref appendixE = [] {
    const double phi_s[20] = {0, 0, 0, 0, 0, 2.0, 0, 0, 0.5, 0.5, 0.5, 0, 0, 2.0, 0.5, 1.0, 2.0, 0.75, 0.052, 0};
    Ref r;
    auto names = suite_networks(Suite::AppendixE);
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto src = i < 16 ? table1.at(names[i]) : figure2.at(names[i]);
      r[names[i]] = {{"id", src.at("id")}, {"phi2023_s", phi_s[i]}, {"phi_s1_s", 0}, {"mi", src.at("mi")}, {"syn_s", 0}};
    }
    return r;
  }();
  switch (s) {
    case Suite::Table1: return table1;
    case Suite::Figure2: return figure2;
    case Suite::Appendix4: return appendix4;
    case Suite::AppendixE: return appendixE;
  }
  return table1;
}

std::vector<CheckOutcome> check_table(const Table& t, double tol) {
  const auto& ref = reference_values(t.suite);
  const bool gated = t.suite == Suite::Figure2 || t.suite == Suite::Appendix4;
  std::vector<CheckOutcome> out;
  for (auto& row : t.rows) {
    auto it = ref.find(row.network);
    if (it == ref.end()) continue;
    auto actual = [&](const std::string& key) -> std::optional<double> {
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i].key == key && row.cells[i].error.empty()) return row.cells[i].value;
      return std::nullopt;
    };
    auto close = [&](const std::string& key) {
      auto a = actual(key);
      return a && std::abs(*a - it->second.at(key)) <= tol;
    };
    const bool topology_ok = !gated || (close("id") && close("mi"));
    for (auto& col : t.columns) {
      auto jt = it->second.find(col.key);
      if (jt == it->second.end()) continue;
      CheckOutcome o{row.network, col.key, jt->second, actual(col.key)};
      o.excluded = !topology_ok && col.key != "id" && col.key != "mi";
      o.pass = !o.excluded && close(col.key);
      out.push_back(o);
    }
  }
  return out;
}

}  // namespace synphi
