#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "run_config.hpp"

namespace subscat::cli {

using Json = nlohmann::ordered_json;

/// What every artifact records about the run that produced it.
struct RunInfo {
  std::string command;
  std::string profile;  // tolerance profile name
  const RunConfig* config = nullptr;
};

Json metadata(const RunInfo& info);

/// A CSV table: '#' metadata lines, one header row, then rows of numbers
/// (17 significant digits) or preformatted cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const RunInfo& info, const std::vector<std::string>& columns,
            const std::vector<std::string>& extra_comments = {});
  void row(const std::vector<double>& values, const std::vector<std::string>& trailing = {});
  void save() const;

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
};

std::string format_number(double v);

void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace subscat::cli
