#include "artifacts.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "subscat/subscat.h"

namespace subscat::cli {

namespace {

constexpr const char* kUnits = "hbar = m = 1, E = k^2/2";

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

bool has_wells(const BarrierConfig& b) {
  if (b.kind == "rectangular") return b.height < 0.0;
  for (const auto& p : b.profile)
    if (p.height < 0.0) return true;
  return false;
}

}  // namespace

Json metadata(const RunInfo& info) {
  const Tolerances& t = info.config->tolerances;
  Json m;
  m["tool"] = "subscat";
  m["version"] = subscat_version();
  m["command"] = info.command;
  m["config_hash"] = fmt::format("fnv1a64:{:016x}", info.config->hash);
  m["units"] = kUnits;
  m["tolerance_profile"] = info.profile;
  m["tolerances"] = {{"unitarity", t.unitarity}, {"decomposition", t.decomposition}, {"norm", t.norm},
                     {"sum", t.sum},             {"overlap", t.overlap},             {"route", t.route},
                     {"oracle_l2", t.oracle_l2}, {"numerov", t.numerov},             {"clock", t.clock}};
  m["config"] = info.config->text;
  if (has_wells(info.config->barrier))
    m["warnings"] = Json::array({"negative potential heights: outside the tested regime"});
  return m;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const std::filesystem::path& path, const RunInfo& info, const std::vector<std::string>& columns,
                     const std::vector<std::string>& extra_comments)
    : path_(path), columns_(columns.size()) {
  const Json m = metadata(info);
  buffer_ += fmt::format("# subscat {} {}\n", m["version"].get<std::string>(), info.command);
  buffer_ += fmt::format("# config_hash {}\n", m["config_hash"].get<std::string>());
  buffer_ += fmt::format("# units {}\n", kUnits);
  buffer_ += fmt::format("# tolerance_profile {}\n", info.profile);
  buffer_ += "# tolerances " + m["tolerances"].dump() + "\n";
  if (m.contains("warnings"))
    for (const auto& w : m["warnings"]) buffer_ += "# warning " + w.get<std::string>() + "\n";
  for (const auto& c : extra_comments) buffer_ += "# " + c + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) buffer_ += (i ? "," : "") + columns[i];
  buffer_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values, const std::vector<std::string>& trailing) {
  if (values.size() + trailing.size() != columns_) throw std::logic_error("csv row width does not match header");
  bool first = true;
  for (double v : values) {
    if (!first) buffer_ += ',';
    buffer_ += format_number(v);
    first = false;
  }
  for (const auto& s : trailing) {
    if (!first) buffer_ += ',';
    buffer_ += s;
    first = false;
  }
  buffer_ += '\n';
}

void CsvWriter::save() const { write_file(path_, buffer_); }

void write_json(const std::filesystem::path& path, const Json& doc) { write_file(path, doc.dump(2) + "\n"); }

}  // namespace subscat::cli
