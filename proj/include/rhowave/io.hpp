#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rhowave::io {

// Numeric CSV with a single header line. Cells are parsed as doubles.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int col(const std::string& name) const;  // -1 when absent
};

Csv read_csv(const std::filesystem::path& path);

std::string format_double(double v);  // round-trippable (max_digits10)

// Write-temp-then-rename so readers never observe partial files.
void atomic_write(const std::filesystem::path& path, const std::string& content);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace rhowave::io
