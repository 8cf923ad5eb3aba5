#include "polybddc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace polybddc {

namespace {

std::string field(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

std::string field(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << kCsvHeader << '\n';
  for (const StudyRow& r : rows) {
    out << r.family << ',' << field(r.h) << ',' << field(r.k) << ',' << r.method << ',' << field(r.np) << ','
        << field(r.h_ratio) << ',' << field(r.iterations) << ',' << field(r.kappa) << ',' << field(r.lambda_max)
        << ',' << field(r.error_l2) << ',' << field(r.fit_slope) << ',' << field(r.fit_r2) << '\n';
  }
}

void write_csv(const std::string& path, const std::vector<StudyRow>& rows) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(file, rows);
  if (!file) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace polybddc
