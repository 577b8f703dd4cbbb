#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "synphi/report.hpp"

using namespace synphi;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, sep);) out.push_back(f);
  return out;
}

const Table& table1() {
  static const Table t = run_suite(Suite::Table1);
  return t;
}

}  // namespace

TEST(Report, HalfEvenRounding) {
  EXPECT_EQ(round3(0.0625), "0.062");
  EXPECT_EQ(round3(0.1875), "0.188");
  EXPECT_EQ(round3(1.0625), "1.062");
  EXPECT_EQ(round3(0.6035), "0.604");  // stored a hair above .6035
  EXPECT_EQ(round3(2.0), "2.000");
  EXPECT_EQ(round3(-0.0001), "0.000");
  EXPECT_EQ(round3(-0.0), "0.000");
}

TEST(Report, CellRendering) {
  Cell c;
  EXPECT_EQ(render_cell(c), "—");
  c.value = 0.5;
  EXPECT_EQ(render_cell(c), "0.500");
  c.bounded = true;
  EXPECT_EQ(render_cell(c), "0.500*");
  c.error = "boom";
  EXPECT_EQ(render_cell(c), "ERR");
}

TEST(Report, Table1MatchesPublished) {
  auto& t = table1();
  ASSERT_EQ(t.rows.size(), 16u);
  EXPECT_FALSE(t.has_errors());
  for (auto& o : check_table(t)) EXPECT_TRUE(o.pass) << o.network << " " << o.column;
}

TEST(Report, FormatsCarryTheSameValues) {
  auto& t = table1();
  auto csv = render(t, Format::Csv);
  auto md = render(t, Format::Markdown);
  auto js = nlohmann::json::parse(render(t, Format::Json));

  std::stringstream cs(csv), ms(md);
  std::string cl, ml;
  std::getline(cs, cl);  // header
  std::getline(ms, ml);
  std::getline(ms, ml);  // alignment row
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ASSERT_TRUE(std::getline(cs, cl));
    ASSERT_TRUE(std::getline(ms, ml));
    auto cf = split(cl, ',');
    auto mf = split(ml, '|');
    ASSERT_EQ(cf.size(), t.columns.size() + 1);
    EXPECT_EQ(cf[0], t.rows[r].network);
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& key = t.columns[c].key;
      auto display = js["rows"][r]["cells"][key]["display"].get<std::string>();
      EXPECT_EQ(cf[c + 1], display);
      std::string m = mf[c + 2];
      m = m.substr(1, m.size() - 2);
      EXPECT_EQ(m, display);
      if (t.rows[r].cells[c].value) EXPECT_EQ(js["rows"][r]["cells"][key]["value"].get<double>(), *t.rows[r].cells[c].value);
    }
  }
}

TEST(Report, Deterministic) {
  ReportOptions one, many;
  one.threads = 1;
  many.threads = 8;
  auto a = render(run_suite(Suite::Table1, one), Format::Csv);
  auto b = render(run_suite(Suite::Table1, many), Format::Csv);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find('\r'), std::string::npos);
}

TEST(Report, BoundedMarkerVisibleEverywhere) {
  Table t;
  t.suite = Suite::Figure2;
  t.columns = {{"x", "X"}};
  Cell c;
  c.value = 0.25;
  c.bounded = true;
  t.rows.push_back({"N", {c}});
  EXPECT_NE(render(t, Format::Csv).find("0.250*"), std::string::npos);
  EXPECT_NE(render(t, Format::Markdown).find("0.250*"), std::string::npos);
  auto js = nlohmann::json::parse(render(t, Format::Json));
  EXPECT_TRUE(js["rows"][0]["cells"]["x"]["bounded"].get<bool>());
  EXPECT_EQ(js["rows"][0]["cells"]["x"]["display"], "0.250*");
}

TEST(Report, CsvQuoting) {
  Table t;
  t.columns = {{"x", "a,b"}};
  Cell c;
  c.value = 1;
  t.rows.push_back({"has \"quote\"", {c}});
  auto csv = render(t, Format::Csv);
  EXPECT_NE(csv.find("\"a,b\""), std::string::npos);
  EXPECT_NE(csv.find("\"has \"\"quote\"\"\""), std::string::npos);
}

TEST(Report, SidecarColumns) {
  auto sc = parse_sidecar("# legacy\nAND-ZERO,phi2008,0.25\nGET-GET,phi2014,1.5\n");
  EXPECT_DOUBLE_EQ(sc["AND-ZERO"]["phi2008"], 0.25);
  ReportOptions o;
  o.sidecar = sc;
  auto t = run_suite(Suite::Table1, o);
  EXPECT_EQ(render_cell(t.rows[6].cells[1]), "0.250");
  EXPECT_EQ(render_cell(t.rows[0].cells[1]), "—");
  EXPECT_THROW(parse_sidecar("AND-ZERO,phi2008\n"), std::invalid_argument);
  EXPECT_THROW(parse_sidecar("AND-ZERO,phi9999,1\n"), std::invalid_argument);
}

TEST(Report, SuiteParsing) {
  EXPECT_EQ(parse_suite("table1"), Suite::Table1);
  EXPECT_EQ(parse_suite("appendixE"), Suite::AppendixE);
  EXPECT_FALSE(parse_suite("table9").has_value());
  EXPECT_EQ(suite_networks(Suite::AppendixE).size(), 20u);
}
