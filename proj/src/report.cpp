#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nero/error.hpp"
#include "nero/harness.hpp"

namespace nero {
namespace {

constexpr const char* kRowHeader = "problem,solver,f1,runtime_s,explored,best_concept,termination,error";
constexpr const char* kAggregateHeader =
    "solver,count,f1_mean,f1_std,runtime_mean,runtime_std,explored_mean,explored_std";

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "' in report");
  return v;
}

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad count '" + s + "' in report");
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// Splits one CSV record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false, any = false;
  for (int ch = in.get(); ch != EOF; ch = in.get()) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::string join_header(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + fields[i];
  return s;
}

}  // namespace

void write_report_json(std::ostream& out, const BenchmarkReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"problem", r.problem},
                    {"solver", r.solver},
                    {"f1", r.f1},
                    {"runtime_s", r.runtime_seconds},
                    {"explored", r.explored},
                    {"best_concept", r.best_concept},
                    {"termination", r.termination},
                    {"error", r.error}});
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& a : report.aggregates)
    aggs.push_back({{"solver", a.solver},
                    {"count", a.count},
                    {"f1_mean", a.f1_mean},
                    {"f1_std", a.f1_std},
                    {"runtime_mean", a.runtime_mean},
                    {"runtime_std", a.runtime_std},
                    {"explored_mean", a.explored_mean},
                    {"explored_std", a.explored_std}});
  out << nlohmann::json{{"rows", rows}, {"aggregates", aggs}}.dump(2) << '\n';
}

BenchmarkReport read_report_json(std::istream& in) {
  BenchmarkReport report;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& r : doc.at("rows"))
      report.rows.push_back({r.at("problem").get<std::string>(), r.at("solver").get<std::string>(), r.at("f1").get<double>(),
                             r.at("runtime_s").get<double>(), r.at("explored").get<std::size_t>(),
                             r.at("best_concept").get<std::string>(), r.at("termination").get<std::string>(),
                             r.at("error").get<std::string>()});
    for (const auto& a : doc.at("aggregates"))
      report.aggregates.push_back({a.at("solver").get<std::string>(), a.at("count").get<std::size_t>(),
                                   a.at("f1_mean").get<double>(), a.at("f1_std").get<double>(),
                                   a.at("runtime_mean").get<double>(), a.at("runtime_std").get<double>(),
                                   a.at("explored_mean").get<double>(), a.at("explored_std").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid report JSON: ") + e.what());
  }
  return report;
}

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << kRowHeader << '\n';
  for (const auto& r : report.rows)
    out << csv_field(r.problem) << ',' << csv_field(r.solver) << ',' << fmt_double(r.f1) << ','
        << fmt_double(r.runtime_seconds) << ',' << r.explored << ',' << csv_field(r.best_concept) << ','
        << csv_field(r.termination) << ',' << csv_field(r.error) << '\n';
  out << '\n' << kAggregateHeader << '\n';
  for (const auto& a : report.aggregates)
    out << csv_field(a.solver) << ',' << a.count << ',' << fmt_double(a.f1_mean) << ',' << fmt_double(a.f1_std) << ','
        << fmt_double(a.runtime_mean) << ',' << fmt_double(a.runtime_std) << ',' << fmt_double(a.explored_mean) << ','
        << fmt_double(a.explored_std) << '\n';
}

BenchmarkReport read_report_csv(std::istream& in) {
  BenchmarkReport report;
  std::vector<std::string> f;
  if (!read_record(in, f) || join_header(f) != kRowHeader) throw FormatError("report CSV has an unexpected header");
  bool in_aggregates = false;
  while (read_record(in, f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (!in_aggregates && join_header(f) == kAggregateHeader) {
      in_aggregates = true;
      continue;
    }
    if (!in_aggregates) {
      if (f.size() != 8) throw FormatError("report CSV row has " + std::to_string(f.size()) + " fields, expected 8");
      report.rows.push_back({f[0], f[1], parse_double(f[2]), parse_double(f[3]), parse_size(f[4]), f[5], f[6], f[7]});
    } else {
      if (f.size() != 8) throw FormatError("aggregate CSV row has " + std::to_string(f.size()) + " fields, expected 8");
      report.aggregates.push_back({f[0], parse_size(f[1]), parse_double(f[2]), parse_double(f[3]), parse_double(f[4]),
                                   parse_double(f[5]), parse_double(f[6]), parse_double(f[7])});
    }
  }
  return report;
}

void write_report_file(const std::string& path, const BenchmarkReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (csv)
    write_report_csv(out, report);
  else
    write_report_json(out, report);
}

}  // namespace nero
