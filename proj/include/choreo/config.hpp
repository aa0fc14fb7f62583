#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "choreo/optimize.hpp"
#include "choreo/potential.hpp"
#include "choreo/symmetry.hpp"

namespace choreo {

struct OutputPaths {
  std::string orbit;
  std::string csv;
  std::string svg;

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

/// Everything needed to reproduce one solve. Group sizes of `spec` always
/// mirror the lengths of `masses`.
struct ConfigDocument {
  std::vector<std::vector<double>> masses;
  ConstraintSpec spec;
  double exponent = 1.0;
  double period = 6.283185307179586;
  Resolution resolution;
  ContinuationSchedule schedule;
  OptimizerParams optimizer;
  std::uint64_t seed = 1;
  double perturbation = 0.01;
  OutputPaths output;

  MassSystem mass_system() const;
  /// Throws ValidationError naming the offending field.
  void validate() const;
};

bool operator==(const ConfigDocument& a, const ConfigDocument& b);

/// Parses JSON text. Throws ParseError (line/column) for malformed input and
/// ValidationError for unknown or invalid fields (JSON pointer in field()).
ConfigDocument parse_config(const std::string& text);
std::string serialize_config(const ConfigDocument& doc);

ConfigDocument load_config(const std::string& path);
void save_config(const ConfigDocument& doc, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace choreo
