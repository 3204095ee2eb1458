#ifndef CQSENSE_CSV_HPP
#define CQSENSE_CSV_HPP

#include <string>
#include <vector>

namespace cqsense {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column by name; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);

/// Header row plus one line per row, comma separated, LF terminated.
/// Throws NumericalError on non-finite values or ragged rows.
std::string to_csv(const CsvTable& table);

CsvTable parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cqsense

#endif  // CQSENSE_CSV_HPP
