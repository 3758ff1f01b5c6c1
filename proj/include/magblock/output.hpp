#pragma once

// Data-file writers for sweep results. CSV rows are: axis columns, then
// g2, mean_number, cutoff_used, status. Numbers carry 17 significant digits
// and failed points leave the observable fields empty, so files are
// byte-stable for deterministic solvers and never contain NaN.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "magblock/sweep.hpp"

namespace magblock {

enum class DataFormat { csv, ndjson };

DataFormat format_from_name(std::string_view name);
std::string_view extension(DataFormat f);

std::string format_double(double v);

std::vector<std::string> data_columns(const SweepSpec& spec);

void write_csv(std::ostream& os, const SweepResult& r);
void write_ndjson(std::ostream& os, const SweepResult& r);
void write_data(std::ostream& os, const SweepResult& r, DataFormat f);

/// Parses a CSV produced by write_csv back into rows of fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& is);

nlohmann::json provenance_json(const SweepResult& r, const std::string& data_file,
                               const std::string& figure, const std::string& curve);

struct WrittenCurve {
  std::filesystem::path data_file;
  std::filesystem::path sidecar;
  SweepSpec spec;
  std::string label;
};

/// Writes `<stem>.<ext>` and `<stem>.provenance.json` into dir.
WrittenCurve write_result(const std::filesystem::path& dir, const std::string& stem,
                          const SweepResult& r, DataFormat f, const std::string& figure,
                          const std::string& curve);

/// gnuplot script plotting log10 g2 from the given CSV files.
std::string gnuplot_script(const std::string& title, const std::vector<WrittenCurve>& curves);

}  // namespace magblock
