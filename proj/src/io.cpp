#include "nsqa/io.hpp"

#include <cstdio>

#include "nsqa/model.hpp"

namespace nsqa::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw ParameterError("cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::add(double v) { return add(format_double(v)); }
CsvWriter& CsvWriter::add(int v) { return add(std::to_string(v)); }

CsvWriter& CsvWriter::add(const std::string& v) {
  row_.push_back(v);
  return *this;
}

void CsvWriter::end_row() {
  if (row_.size() != columns_) throw ParameterError("CSV row width does not match header");
  for (std::size_t i = 0; i < row_.size(); ++i) out_ << (i ? "," : "") << row_[i];
  out_ << '\n';
  row_.clear();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace nsqa::io
