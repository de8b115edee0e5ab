#ifndef MAGICSIM_REPORT_HPP_
#define MAGICSIM_REPORT_HPP_

// CSV and JSON result files. Numbers print with round-trip precision so a
// given (config, seed) reproduces byte-identical output.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "magicsim/errors.hpp"

namespace magicsim {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw NumericError("cannot open output file: " + path.string());
    out_ << std::setprecision(17);
  }

  void header(const std::vector<std::string>& columns) { write_row(columns); }

  void row(const std::vector<double>& values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format(v);
      first = false;
    }
    out_ << '\n';
  }

  void write_row(const std::vector<std::string>& cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  static std::string format(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
  }

 private:
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path,
                       const nlohmann::ordered_json& doc) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot open output file: " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace magicsim

#endif  // MAGICSIM_REPORT_HPP_
