// csv.hpp — small CSV writer used by the command-line tool: '#' comment lines
// echo the resolved configuration, then a header row, then data rows with
// doubles serialized in shortest round-trip form.

#pragma once

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "resetmap/errors.hpp"
#include "resetmap/linalg.hpp"
#include "resetmap/spdm.hpp"

namespace resetmap {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& text) { os_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& names) {
    write_row_strings(names);
  }

  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) os_ << ',';
      os_ << format_double(values[i]);
    }
    os_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& cells) {
    write_row_strings(cells);
  }

 private:
  void write_row_strings(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

  std::ostream& os_;
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file: " + path);
  return os;
}

// Full-snapshot trace: one row per cycle, columns rho_<a>_<b>_re / _im for
// every matrix entry. Only sensible for small models.
inline void write_snapshot_csv(std::ostream& os, const StepTrace& trace,
                               const std::vector<std::string>& comments) {
  if (trace.snapshots.empty()) {
    throw InternalCheckError("trace has no snapshots to write");
  }
  CsvWriter w(os);
  for (const auto& c : comments) w.comment(c);
  const Eigen::Index n = trace.snapshots.front().rows();
  std::vector<std::string> names;
  names.push_back("t");
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const std::string stem =
          "rho_" + std::to_string(a) + "_" + std::to_string(b);
      names.push_back(stem + "_re");
      names.push_back(stem + "_im");
    }
  }
  w.header(names);
  for (size_t m = 0; m < trace.snapshots.size(); ++m) {
    std::vector<double> cells;
    cells.reserve(1 + static_cast<size_t>(2 * n * n));
    cells.push_back(trace.times[m]);
    const ComplexMatrix& rho = trace.snapshots[m];
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        cells.push_back(std::real(rho(a, b)));
        cells.push_back(std::imag(rho(a, b)));
      }
    }
    w.row(cells);
  }
}

}  // namespace resetmap
