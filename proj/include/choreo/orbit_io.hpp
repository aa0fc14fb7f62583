#pragma once

#include <optional>
#include <string>
#include <vector>

#include "choreo/config.hpp"
#include "choreo/looppath.hpp"
#include "choreo/optimize.hpp"
#include "choreo/verify.hpp"

namespace choreo {

inline constexpr int kOrbitFormatVersion = 1;

struct BodyState {
  int group = 0;
  int index_in_group = 1;
  std::vector<double> position;
  std::vector<double> velocity;
};

struct SolveSummary {
  bool converged = false;
  bool polished = false;
  std::string outcome;
  double action = 0.0;
  double gradient_norm = 0.0;
  double min_separation = 0.0;
  double constraint_residual = 0.0;
  double wall_seconds = 0.0;
  std::vector<StageReport> stages;
};

struct VerificationSummary {
  std::string classification;
  double periodicity_residual = 0.0;
  double energy_relative_variation = 0.0;
  double energy_constant = 0.0;
  double min_separation = 0.0;
  double collision_measure = 0.0;
  double kinematic_equation_residual = 0.0;
  bool integration_completed = false;
  int steps = 0;
  std::vector<double> norm_bound_margins;
};

struct OrbitDocument {
  int format_version = kOrbitFormatVersion;
  ConfigDocument config;
  std::vector<FourierLoop> generators;
  std::vector<BodyState> bodies;
  std::optional<SolveSummary> solve;
  std::optional<VerificationSummary> verification;

  /// All body loops reconstructed from the generators.
  std::vector<FourierLoop> body_loops() const;
};

SolveSummary summarize(const SolveReport& report, double constraint_residual);
VerificationSummary summarize(const VerificationReport& report);

/// Fills generators and body initial states from a coefficient vector.
OrbitDocument make_orbit(const ConfigDocument& config, std::vector<FourierLoop> generators);

std::string serialize_orbit(const OrbitDocument& doc);
/// Throws ParseError / ValidationError like parse_config.
OrbitDocument parse_orbit(const std::string& text);
OrbitDocument load_orbit(const std::string& path);
void save_orbit(const OrbitDocument& doc, const std::string& path);

/// Header "t,b1_x,b1_y,..." then M_out rows at t_j = j T / M_out.
std::string export_csv(const OrbitDocument& doc, int m_out = 256);

}  // namespace choreo
