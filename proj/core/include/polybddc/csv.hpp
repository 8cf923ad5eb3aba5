#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace polybddc {

/// One result row. Empty optionals become empty CSV fields.
struct StudyRow {
  std::string family;
  std::optional<double> h;
  std::optional<int> k;
  std::string method;
  std::optional<int> np;
  std::optional<double> h_ratio;
  std::optional<int> iterations;
  std::optional<double> kappa;
  std::optional<double> lambda_max;
  std::optional<double> error_l2;
  std::optional<double> fit_slope;
  std::optional<double> fit_r2;

  // not part of the CSV schema
  std::string gamma;
  std::optional<bool> converged;
  std::optional<double> error_energy;
  std::optional<double> rate_l2;
  std::optional<double> rate_energy;
};

inline constexpr const char* kCsvHeader =
    "family,h,k,method,np,h_ratio,iterations,kappa,lambda_max,error_l2,fit_slope,fit_r2";

/// Header line followed by one line per row, LF line endings.
void write_csv(std::ostream& out, const std::vector<StudyRow>& rows);
void write_csv(const std::string& path, const std::vector<StudyRow>& rows);

}  // namespace polybddc
