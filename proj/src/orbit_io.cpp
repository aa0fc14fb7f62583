#include "choreo/orbit_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "choreo/error.hpp"
#include "json_detail.hpp"

namespace choreo {

using detail::json;

std::vector<FourierLoop> OrbitDocument::body_loops() const { return body_trajectories(config.spec, generators); }

SolveSummary summarize(const SolveReport& report, double constraint_residual) {
  SolveSummary s;
  s.converged = report.converged;
  s.polished = report.polished;
  s.outcome = report.outcome;
  s.action = report.final.action;
  s.gradient_norm = report.stages.empty() ? 0.0 : report.stages.back().gradient_norm;
  s.min_separation = report.final.min_separation;
  s.constraint_residual = constraint_residual;
  s.wall_seconds = report.wall_seconds;
  s.stages = report.stages;
  return s;
}

VerificationSummary summarize(const VerificationReport& report) {
  VerificationSummary v;
  v.classification = classification_name(report.classification);
  v.periodicity_residual = report.periodicity_residual;
  v.energy_relative_variation = report.energy.relative_variation;
  v.energy_constant = report.energy_constant;
  v.min_separation = report.collisions.min_separation;
  v.collision_measure = report.collisions.measure;
  v.kinematic_equation_residual = report.kinematic_equation_residual;
  v.integration_completed = report.integration_completed;
  v.steps = report.steps;
  if (report.norm_bounds) {
    for (const auto& b : report.norm_bounds->bounds) v.norm_bound_margins.push_back(b.margin);
  }
  return v;
}

OrbitDocument make_orbit(const ConfigDocument& config, std::vector<FourierLoop> generators) {
  OrbitDocument doc;
  doc.config = config;
  doc.generators = std::move(generators);
  const auto loops = doc.body_loops();
  const auto layout = body_layout(config.spec);
  for (std::size_t b = 0; b < loops.size(); ++b) {
    BodyState s;
    s.group = layout[b].group;
    s.index_in_group = layout[b].index_in_group;
    const Eigen::VectorXd q = evaluate(loops[b], 0.0), v = velocity(loops[b], 0.0);
    s.position.assign(q.data(), q.data() + q.size());
    s.velocity.assign(v.data(), v.data() + v.size());
    doc.bodies.push_back(std::move(s));
  }
  return doc;
}

namespace {

// Infinite residuals (aborted integrations) are stored as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& v, const std::string& pointer) {
  return v.is_null() ? std::numeric_limits<double>::infinity() : detail::get_number(v, pointer);
}

json stage_to_json(const StageReport& s) {
  return {{"delta", s.delta},
          {"iterations", s.iterations},
          {"evaluations", s.evaluations},
          {"action_start", s.action_start},
          {"action", s.action},
          {"gradient_norm", s.gradient_norm},
          {"min_separation", finite_or_null(s.min_separation)},
          {"constraint_residual", s.constraint_residual},
          {"converged", s.converged},
          {"stagnated", s.stagnated},
          {"message", s.message}};
}

StageReport stage_from_json(const json& j, const std::string& p) {
  detail::check_keys(j, p, {"delta", "iterations", "evaluations", "action_start", "action", "gradient_norm",
                             "min_separation", "constraint_residual", "converged", "stagnated", "message"});
  StageReport s;
  s.delta = detail::get_number(detail::require(j, p, "delta"), p + "/delta");
  s.iterations = detail::get_int(detail::require(j, p, "iterations"), p + "/iterations");
  s.evaluations = detail::get_int(detail::require(j, p, "evaluations"), p + "/evaluations");
  s.action_start = detail::get_number(detail::require(j, p, "action_start"), p + "/action_start");
  s.action = detail::get_number(detail::require(j, p, "action"), p + "/action");
  s.gradient_norm = detail::get_number(detail::require(j, p, "gradient_norm"), p + "/gradient_norm");
  s.min_separation = number_or_inf(detail::require(j, p, "min_separation"), p + "/min_separation");
  s.constraint_residual = detail::get_number(detail::require(j, p, "constraint_residual"), p + "/constraint_residual");
  s.converged = detail::get_bool(detail::require(j, p, "converged"), p + "/converged");
  s.stagnated = detail::get_bool(detail::require(j, p, "stagnated"), p + "/stagnated");
  s.message = detail::get_string(detail::require(j, p, "message"), p + "/message");
  return s;
}

std::vector<double> number_list(const json& j, const std::string& p) {
  if (!j.is_array()) throw ValidationError(p, p + ": expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(detail::get_number(j[i], p + "/" + std::to_string(i)));
  return out;
}

}  // namespace

std::string serialize_orbit(const OrbitDocument& doc) {
  json j;
  j["format_version"] = doc.format_version;
  j["config"] = detail::config_to_json(doc.config);
  j["generators"] = json::array();
  for (const auto& g : doc.generators) {
    json coords = json::array();
    const int width = g.coeffs_per_coord();
    for (int c = 0; c < g.dim(); ++c) {
      coords.push_back(std::vector<double>(g.data().begin() + c * width, g.data().begin() + (c + 1) * width));
    }
    j["generators"].push_back({{"period", g.period()}, {"dim", g.dim()}, {"k_max", g.k_max()}, {"coefficients", coords}});
  }
  j["bodies"] = json::array();
  for (const auto& b : doc.bodies) {
    j["bodies"].push_back(
        {{"group", b.group}, {"index", b.index_in_group}, {"position", b.position}, {"velocity", b.velocity}});
  }
  if (doc.solve) {
    const auto& s = *doc.solve;
    json stages = json::array();
    for (const auto& st : s.stages) stages.push_back(stage_to_json(st));
    j["solve"] = {{"converged", s.converged},
                  {"polished", s.polished},
                  {"outcome", s.outcome},
                  {"action", s.action},
                  {"gradient_norm", s.gradient_norm},
                  {"min_separation", finite_or_null(s.min_separation)},
                  {"constraint_residual", s.constraint_residual},
                  {"wall_seconds", s.wall_seconds},
                  {"stages", stages}};
  }
  if (doc.verification) {
    const auto& v = *doc.verification;
    j["verification"] = {{"classification", v.classification},
                         {"periodicity_residual", finite_or_null(v.periodicity_residual)},
                         {"energy_relative_variation", finite_or_null(v.energy_relative_variation)},
                         {"energy_constant", finite_or_null(v.energy_constant)},
                         {"min_separation", finite_or_null(v.min_separation)},
                         {"collision_measure", v.collision_measure},
                         {"kinematic_equation_residual", finite_or_null(v.kinematic_equation_residual)},
                         {"integration_completed", v.integration_completed},
                         {"steps", v.steps},
                         {"norm_bound_margins", v.norm_bound_margins}};
  }
  return j.dump(2) + "\n";
}

OrbitDocument parse_orbit(const std::string& text) {
  const json j = detail::parse_json(text);
  detail::check_keys(j, "", {"format_version", "config", "generators", "bodies", "solve", "verification"});
  OrbitDocument doc;
  doc.format_version = detail::get_int(detail::require(j, "", "format_version"), "/format_version");
  if (doc.format_version != kOrbitFormatVersion) {
    throw ValidationError("/format_version", "unsupported orbit format version " + std::to_string(doc.format_version));
  }
  doc.config = detail::config_from_json(detail::require(j, "", "config"), "/config");

  const json& gens = detail::require(j, "", "generators");
  if (!gens.is_array()) throw ValidationError("/generators", "/generators: expected a list");
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const std::string p = "/generators/" + std::to_string(g);
    detail::check_keys(gens[g], p, {"period", "dim", "k_max", "coefficients"});
    const double period = detail::get_number(detail::require(gens[g], p, "period"), p + "/period");
    const int dim = detail::get_int(detail::require(gens[g], p, "dim"), p + "/dim");
    const int k = detail::get_int(detail::require(gens[g], p, "k_max"), p + "/k_max");
    if (dim < 1 || k < 1 || !(period > 0.0)) throw ValidationError(p, p + ": invalid loop shape");
    FourierLoop loop(period, dim, k);
    const json& coeffs = detail::require(gens[g], p, "coefficients");
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != dim) {
      throw ValidationError(p + "/coefficients", p + "/coefficients: expected one list per coordinate");
    }
    for (int c = 0; c < dim; ++c) {
      const std::string cp = p + "/coefficients/" + std::to_string(c);
      const auto values = number_list(coeffs[c], cp);
      if (static_cast<int>(values.size()) != loop.coeffs_per_coord()) {
        throw ValidationError(cp, cp + ": expected " + std::to_string(loop.coeffs_per_coord()) + " coefficients");
      }
      std::copy(values.begin(), values.end(), loop.data().begin() + c * loop.coeffs_per_coord());
    }
    doc.generators.push_back(std::move(loop));
  }
  if (static_cast<int>(doc.generators.size()) != doc.config.spec.generator_count()) {
    throw ValidationError("/generators", "/generators: count does not match the spec");
  }

  const json& bodies = detail::require(j, "", "bodies");
  if (!bodies.is_array()) throw ValidationError("/bodies", "/bodies: expected a list");
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    const std::string p = "/bodies/" + std::to_string(b);
    detail::check_keys(bodies[b], p, {"group", "index", "position", "velocity"});
    BodyState s;
    s.group = detail::get_int(detail::require(bodies[b], p, "group"), p + "/group");
    s.index_in_group = detail::get_int(detail::require(bodies[b], p, "index"), p + "/index");
    s.position = number_list(detail::require(bodies[b], p, "position"), p + "/position");
    s.velocity = number_list(detail::require(bodies[b], p, "velocity"), p + "/velocity");
    doc.bodies.push_back(std::move(s));
  }

  if (j.contains("solve")) {
    const json& s = j.at("solve");
    const std::string p = "/solve";
    detail::check_keys(s, p, {"converged", "polished", "outcome", "action", "gradient_norm", "min_separation",
                              "constraint_residual", "wall_seconds", "stages"});
    SolveSummary out;
    out.converged = detail::get_bool(detail::require(s, p, "converged"), p + "/converged");
    out.polished = detail::get_bool(detail::require(s, p, "polished"), p + "/polished");
    out.outcome = detail::get_string(detail::require(s, p, "outcome"), p + "/outcome");
    out.action = detail::get_number(detail::require(s, p, "action"), p + "/action");
    out.gradient_norm = detail::get_number(detail::require(s, p, "gradient_norm"), p + "/gradient_norm");
    out.min_separation = number_or_inf(detail::require(s, p, "min_separation"), p + "/min_separation");
    out.constraint_residual =
        detail::get_number(detail::require(s, p, "constraint_residual"), p + "/constraint_residual");
    out.wall_seconds = detail::get_number(detail::require(s, p, "wall_seconds"), p + "/wall_seconds");
    const json& stages = detail::require(s, p, "stages");
    if (!stages.is_array()) throw ValidationError(p + "/stages", p + "/stages: expected a list");
    for (std::size_t i = 0; i < stages.size(); ++i) {
      out.stages.push_back(stage_from_json(stages[i], p + "/stages/" + std::to_string(i)));
    }
    doc.solve = out;
  }

  if (j.contains("verification")) {
    const json& v = j.at("verification");
    const std::string p = "/verification";
    detail::check_keys(v, p, {"classification", "periodicity_residual", "energy_relative_variation",
                              "energy_constant", "min_separation", "collision_measure",
                              "kinematic_equation_residual", "integration_completed", "steps",
                              "norm_bound_margins"});
    VerificationSummary out;
    out.classification = detail::get_string(detail::require(v, p, "classification"), p + "/classification");
    out.periodicity_residual = number_or_inf(detail::require(v, p, "periodicity_residual"), p + "/periodicity_residual");
    out.energy_relative_variation =
        number_or_inf(detail::require(v, p, "energy_relative_variation"), p + "/energy_relative_variation");
    out.energy_constant = number_or_inf(detail::require(v, p, "energy_constant"), p + "/energy_constant");
    out.min_separation = number_or_inf(detail::require(v, p, "min_separation"), p + "/min_separation");
    out.collision_measure = detail::get_number(detail::require(v, p, "collision_measure"), p + "/collision_measure");
    out.kinematic_equation_residual =
        number_or_inf(detail::require(v, p, "kinematic_equation_residual"), p + "/kinematic_equation_residual");
    out.integration_completed =
        detail::get_bool(detail::require(v, p, "integration_completed"), p + "/integration_completed");
    out.steps = detail::get_int(detail::require(v, p, "steps"), p + "/steps");
    out.norm_bound_margins = number_list(detail::require(v, p, "norm_bound_margins"), p + "/norm_bound_margins");
    doc.verification = out;
  }
  return doc;
}

OrbitDocument load_orbit(const std::string& path) { return parse_orbit(read_text_file(path)); }

void save_orbit(const OrbitDocument& doc, const std::string& path) { write_text_file(path, serialize_orbit(doc)); }

std::string export_csv(const OrbitDocument& doc, int m_out) {
  if (m_out < 1) throw DomainError("export_csv: need at least one row");
  const auto loops = doc.body_loops();
  std::string out = "t";
  static const char* axis[] = {"x", "y", "z"};
  for (std::size_t b = 0; b < loops.size(); ++b) {
    for (int c = 0; c < loops[b].dim(); ++c) out += ",b" + std::to_string(b + 1) + "_" + axis[c];
  }
  out += "\n";
  char buf[32];
  const double period = doc.config.period;
  for (int j = 0; j < m_out; ++j) {
    const double t = period * j / m_out;
    std::snprintf(buf, sizeof buf, "%.17g", t);
    out += buf;
    for (const auto& loop : loops) {
      const Eigen::VectorXd q = evaluate(loop, t);
      for (int c = 0; c < q.size(); ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g", q(c));
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace choreo
