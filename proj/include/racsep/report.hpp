#pragma once

// Tabular check results and their CSV form.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "racsep/tensor.hpp"

namespace racsep {

/// Reported rows carry values that are shown but never asserted.
enum class Verdict { Pass, Fail, Reported };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

struct ReportRow {
  std::string check;
  std::size_t M = 0, R = 0, T = 0, L = 0;
  Field field = Field::Exact;
  std::uint64_t seed = 0;
  std::string observed;
  std::string expected;
  Verdict verdict = Verdict::Reported;
  std::vector<std::string> extra;
};

class Report {
 public:
  explicit Report(std::vector<std::string> extra_columns = {});

  /// Throws InvalidInputError when row.extra does not match the extra columns.
  void add(ReportRow row);
  void add_all(const std::vector<ReportRow>& rows);

  [[nodiscard]] const std::vector<ReportRow>& rows() const noexcept { return rows_; }
  [[nodiscard]] const std::vector<std::string>& extra_columns() const noexcept { return extra_; }
  [[nodiscard]] std::size_t count(Verdict v) const noexcept;

  /// Header check,M,R,T,L,field,seed,observed,expected,pass then the extras.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<std::string> extra_;
  std::vector<ReportRow> rows_;
};

/// Quotes a field when it holds a comma, quote, CR or LF; quotes are doubled.
[[nodiscard]] std::string csv_escape(std::string_view field);

}  // namespace racsep
