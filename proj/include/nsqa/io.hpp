#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace nsqa::io {

/// Decimal with 17 significant digits (round-trips any double).
std::string format_double(double v);

/// CSV file with a single header row. Fields are written verbatim.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& add(double v);
  CsvWriter& add(int v);
  CsvWriter& add(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::vector<std::string> row_;
};

/// JSON with sorted keys and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace nsqa::io
