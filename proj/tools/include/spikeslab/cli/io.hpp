#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace spikeslab::cli {

// One value per line; blank lines and lines starting with '#' are skipped.
// Throws InvalidArgument with the file and line number on a bad value.
Eigen::VectorXd read_vector(const std::filesystem::path& path);

// Dense comma-separated matrix without a header row.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Shortest round-trip text for finite values; empty for NaN so that
// not-applicable metrics leave the field blank.
std::string csv_number(double value);

// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

// Writes comma-separated rows with LF endings, independent of locale.
class CsvWriter {
 public:
  // Throws InvalidArgument if the file cannot be opened.
  explicit CsvWriter(const std::filesystem::path& path);

  void row(const std::vector<std::string>& fields);
  void comment(std::string_view text);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace spikeslab::cli
