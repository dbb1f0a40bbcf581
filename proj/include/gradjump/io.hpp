#pragma once

// JSON and CSV plumbing: model specs, run configs and result summaries.
// Matrices are row-major arrays of arrays, vectors plain arrays.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradjump/antiplane.hpp"
#include "gradjump/energy.hpp"
#include "gradjump/envelope.hpp"
#include "gradjump/interchange.hpp"
#include "gradjump/jump.hpp"
#include "gradjump/tensor.hpp"

namespace gradjump {

using json = nlohmann::json;

json to_json(const Mat& m);
json to_json(std::span<const double> v);
Mat mat_from_json(const json& j, const std::string& where);
Vec vec_from_json(const json& j, const std::string& where);

/// {"kind", "m", "d", "params": {...}, "gradient_mode": "analytic" | {"fd_step": δ}}.
/// Unknown keys anywhere in the config raise ConfigError.
EnergyModel model_from_json(const json& j);
json model_to_json(const EnergyModel& model);

json to_json(const JumpDiagnostics& d);
json to_json(const ScanResult& s);
json to_json(const VariationResult& v);
json to_json(const LimitFit& f);
json to_json(const CommutationResult& c);
json to_json(const AntiplaneAnalysis& a);
json to_json(const AffineSegment& s);
json to_json(const AffineReport& r);
json to_json(const DirectionalDerivative& d);
json to_json(const PlasticMechanism& m);
json error_to_json(const std::exception& e);

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double x);

/// RFC 4180 table: CRLF line ends, header row, fields quoted when needed.
struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string render() const;
};

std::string csv_field(const std::string& s);

struct PairConfig {
  Mat fp;
  Mat fm;
  double tol = 1e-9;
};

struct ToleranceConfig {
  double abs = 1e-10;
  double rel = 1e-10;
  double affine = 1e-10;
  double fit_residual = 1e-2;
  double derivative = 1e-9;
};

struct ScanConfig {
  std::optional<Vec> radii;
  std::size_t resolution = 128;
  std::vector<Mat> points;
};

struct InterchangeConfig {
  Vec h_grid{0.1, 0.05, 0.025, 0.0125};
  double t = 1.0;
  Vec t_grid;  // commutation t grid; empty skips the commutation check
  std::optional<Vec> nu;
  QuadratureConfig quadrature;
};

struct PathConfig {
  std::size_t points = 101;  // uniform t grid on [0, 1]
};

struct EnvelopeConfig {
  std::size_t intervals = 1000;
};

struct AntiplaneConfig {
  std::optional<AntiplaneParams> params;  // falls back to the model, then the reference values
  std::size_t envelope_samples = 301;
  double envelope_max = 3.0;
  std::size_t mechanisms = 16;
  std::vector<Mat> path;
};

struct OutputConfig {
  std::optional<std::string> dir;
  std::string format = "json";
};

struct RunConfig {
  std::optional<EnergyModel> model;
  std::optional<PairConfig> pair;
  ToleranceConfig tolerances;
  ScanConfig scan;
  InterchangeConfig interchange;
  PathConfig path;
  EnvelopeConfig envelope;
  AntiplaneConfig antiplane;
  OutputConfig outputs;
};

RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& c);

/// Parses text; malformed JSON becomes ConfigError with the parser message.
RunConfig parse_config(const std::string& text);

}  // namespace gradjump
