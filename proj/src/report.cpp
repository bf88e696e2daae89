#include "racsep/report.hpp"

#include <algorithm>
#include <ostream>

namespace racsep {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass: return "true";
    case Verdict::Fail: return "false";
    case Verdict::Reported: return "reported";
  }
  return "reported";
}

Report::Report(std::vector<std::string> extra_columns) : extra_(std::move(extra_columns)) {}

void Report::add(ReportRow row) {
  if (row.extra.size() != extra_.size()) {
    if (!row.extra.empty()) throw InvalidInputError("report row has the wrong number of extra columns");
    row.extra.assign(extra_.size(), "");
  }
  rows_.push_back(std::move(row));
}

void Report::add_all(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) add(r);
}

std::size_t Report::count(Verdict v) const noexcept {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [&](const auto& r) { return r.verdict == v; }));
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Report::write_csv(std::ostream& os) const {
  os << "check,M,R,T,L,field,seed,observed,expected,pass";
  for (const auto& c : extra_) os << ',' << csv_escape(c);
  os << "\r\n";
  for (const auto& r : rows_) {
    os << csv_escape(r.check) << ',' << r.M << ',' << r.R << ',' << r.T << ',' << r.L << ',' << to_string(r.field)
       << ',' << r.seed << ',' << csv_escape(r.observed) << ',' << csv_escape(r.expected) << ','
       << to_string(r.verdict);
    for (const auto& e : r.extra) os << ',' << csv_escape(e);
    os << "\r\n";
  }
}

}  // namespace racsep
