#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "specset/bounds.hpp"
#include "specset/diagnostics.hpp"
#include "specset/regions.hpp"
#include "specset/types.hpp"

namespace specset::io {

/// 17-significant-digit formatting used for every floating-point output.
std::string format_double(double v);

std::string json_escape(const std::string& s);

/// Writes to a temp file in the same directory, then renames into place.
void atomic_write(const std::string& path, const std::string& content);

CMatrix read_matrix_market(std::istream& is);
CMatrix read_matrix_market_file(const std::string& path);
void write_matrix_market(const CMatrix& a, std::ostream& os);
std::string matrix_market_string(const CMatrix& a);

/// Complex literal: "1", "-2.5", "i", "-i", "2i", "1+2i", "1.5e-2-0.5i".
Complex parse_complex(const std::string& text);

/// Region description from the documented JSON schema.
RegionSpec parse_region_json(const std::string& text);

std::string region_to_json(const RegionSpec& spec);

/// report.json body; config_json is embedded verbatim under "config".
std::string report_to_json(const BoundReport& rep, const std::string& config_json,
                           const std::vector<std::pair<std::string, double>>& timings);

/// trace CSV: s, Re zeta, Im zeta, lambda_min(mu), ||R||, w(R).
std::string trace_csv(const BoundReport& rep);

/// Map CSV (resolution rows) with masked points emitted as nan.
std::string map_csv(const Eigen::MatrixXd& map,
                    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

std::string path_csv(const BoundaryPath& path);

}  // namespace specset::io
