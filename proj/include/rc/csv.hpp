#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace rc {

/// 64-bit FNV-1a, used to fingerprint the canonical config in outputs.
std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t v);

/// Ten significant digits.
std::string fmt(double v);

/// CSV file whose first line is "# key=value ..." provenance followed by a
/// header row. Fields containing commas or quotes are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& provenance, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

}  // namespace rc
