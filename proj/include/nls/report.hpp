#pragma once

#include <string>
#include <vector>

namespace nls {

// RFC 4180 style: comma separated, header row, '.' decimal point, every value
// written with %.17e so that doubles round-trip exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

struct ReportSummary {
  std::string text;
  std::vector<std::string> missing;  // artifacts named in the manifest but absent
  std::vector<std::string> flags;    // findings worth a reader's attention
  std::vector<std::string> scripts;  // emitted plot scripts
  bool scientific_failure = false;   // the run stopped on a hypothesis violation
};

// Reads <run_dir>/manifest.json, writes summary.txt and the plot scripts into
// run_dir. A missing manifest is an io error; missing artifacts are listed.
ReportSummary report(const std::string& run_dir);

}  // namespace nls
