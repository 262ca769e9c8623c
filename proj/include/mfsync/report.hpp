#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfsync/dispersion.hpp"
#include "mfsync/hypotheses.hpp"
#include "mfsync/locking.hpp"
#include "mfsync/sync_analysis.hpp"

namespace mfsync {

nlohmann::json to_json(const NormBounds& b);
nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const DispersionParams& p);
nlohmann::json to_json(const SyncVerdict& v);
/// Omits the Psi table, which goes to CSV.
nlohmann::json to_json(const LockResult& r);

/// Shortest decimal that round-trips (%.17g).
std::string format_double(double v);

/// Comma-separated rows with a header line; numbers use format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  /// For rows with non-numeric cells.
  std::ofstream& stream() { return out_; }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

void write_json(const std::string& path, const nlohmann::json& j);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

/// Minimal line plot with axes and a legend.
void write_svg(const std::string& path, const std::string& title,
               const std::vector<SvgSeries>& series);

}  // namespace mfsync
