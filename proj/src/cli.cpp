#include "choreo/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "choreo/error.hpp"
#include "choreo/render.hpp"
#include "choreo/symmetry_analysis.hpp"

namespace choreo {

OrbitDocument solve_config(const ConfigDocument& config, const ProgressFn& progress, SolveReport* report_out,
                           int verify_steps) {
  config.validate();
  const MassSystem sys = config.mass_system();
  const ActionProblem problem(sys, config.spec, config.resolution);
  const Eigen::VectorXd x0 = seed_curve(problem, config.seed, config.perturbation);
  SolveReport report = solve_with_continuation(problem, x0, config.schedule, config.optimizer, progress);

  OrbitDocument doc = make_orbit(config, problem.generators(report.x));
  doc.solve = summarize(report, problem.constraints().residual(report.x));
  const auto generators = doc.generators;
  doc.verification = summarize(classify(doc.body_loops(), sys, {}, verify_steps, &config.spec, &generators));
  if (report_out) *report_out = std::move(report);
  return doc;
}

namespace {

void print_error(std::ostream& err, const std::string& category, const std::string& message) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "error: " << category << ": " << line << "\n";
}

Tolerances parse_tolerances(const std::vector<std::string>& items) {
  Tolerances tol;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("--tol", "--tol expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--tol", "--tol: '" + item + "' has no numeric value");
    }
    if (name == "periodicity") {
      tol.periodicity = value;
    } else if (name == "energy") {
      tol.energy = value;
    } else if (name == "collision") {
      tol.collision_threshold = value;
    } else if (name == "measure") {
      tol.measure = value;
    } else {
      throw ValidationError("--tol", "--tol: unknown tolerance '" + name + "'");
    }
  }
  return tol;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_verification(std::ostream& out, const VerificationReport& r) {
  out << "classification=" << classification_name(r.classification) << "\n";
  out << "periodicity_residual=" << r.periodicity_residual << "\n";
  out << "energy_relative_variation=" << r.energy.relative_variation << "\n";
  out << "energy_constant=" << r.energy_constant << "\n";
  out << "min_separation=" << r.collisions.min_separation << "\n";
  out << "collision_measure=" << r.collisions.measure << "\n";
  out << "kinematic_equation_residual=" << r.kinematic_equation_residual << "\n";
  if (!r.integration_completed) out << "integration_aborted=" << r.abort_message << "\n";
  if (r.norm_bounds) {
    for (const auto& b : r.norm_bounds->bounds) out << "norm_bound[" << b.label << "]=" << b.margin << "\n";
  }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetric periodic orbits on figure-eight curves", "nbody8"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  bool quiet = false;
  auto* solve = app.add_subcommand("solve", "Minimize the action for a config and write an orbit document");
  solve->add_option("--config", config_path, "Config document (*.config.json)")->required();
  solve->add_option("--out", out_path, "Output orbit document; defaults to the config's output.orbit");
  solve->add_flag("--quiet", quiet, "Suppress progress lines on stderr");

  std::string orbit_path;
  int steps = 20000;
  std::vector<std::string> tol_items;
  auto* verify = app.add_subcommand("verify", "Integrate an orbit and classify it");
  verify->add_option("orbit", orbit_path, "Orbit document")->required();
  verify->add_option("--steps", steps, "RK4 steps per period")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol_items, "Tolerance override name=value (periodicity, energy, collision, measure)");

  int n = 0, coprime_k = 0;
  bool even_schedule = false, plan = false;
  std::string dense;
  auto* analyze = app.add_subcommand("analyze", "Combinatorial collision analysis");
  analyze->add_option("--n", n, "Number of bodies");
  analyze->add_flag("--even-schedule", even_schedule, "Forced origin collisions for even N");
  analyze->add_option("--dense-set", dense, "Membership of p/q (fraction of T) in the dense time set");
  analyze->add_flag("--plan", plan, "Arrangement of N bodies on one eight");
  analyze->add_option("--coprime", coprime_k, "Check gcd(K, N) = 1");

  std::string svg_path, panels;
  int density = 512;
  bool no_markers = false;
  auto* plot = app.add_subcommand("plot", "Render an orbit as SVG");
  plot->add_option("orbit", orbit_path, "Orbit document")->required();
  plot->add_option("--out", svg_path, "Output SVG file")->required();
  plot->add_option("--panels", panels, "Comma separated subset of xy,yz,xz,iso");
  plot->add_option("--density", density, "Vertices per polyline")->check(CLI::Range(2, 1000000));
  plot->add_flag("--no-markers", no_markers, "Omit t=0 markers");

  std::string csv_path;
  int rows = 256;
  auto* exp = app.add_subcommand("export", "Export body positions as CSV");
  exp->add_option("orbit", orbit_path, "Orbit document")->required();
  exp->add_option("--csv", csv_path, "Output CSV file")->required();
  exp->add_option("--samples", rows, "Number of rows")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*solve) {
      const ConfigDocument config = load_config(config_path);
      const std::string target = out_path.empty() ? config.output.orbit : out_path;
      if (target.empty()) throw ValidationError("--out", "no output path: pass --out or set output.orbit");
      const OrbitDocument doc = solve_config(config, quiet ? ProgressFn{} : stderr_progress());
      save_orbit(doc, target);
      const auto& s = *doc.solve;
      out << "outcome=" << s.outcome << "\n"
          << "action=" << s.action << "\n"
          << "gradient_norm=" << s.gradient_norm << "\n"
          << "min_separation=" << s.min_separation << "\n"
          << "classification=" << doc.verification->classification << "\n"
          << "orbit=" << target << "\n";
      if (!s.converged) {
        print_error(err, "not-converged", "solver stopped with outcome " + s.outcome + "; orbit written to " + target);
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (*verify) {
      const Tolerances tol = parse_tolerances(tol_items);
      const OrbitDocument doc = load_orbit(orbit_path);
      const auto generators = doc.generators;
      const auto report =
          classify(doc.body_loops(), doc.config.mass_system(), tol, steps, &doc.config.spec, &generators);
      print_verification(out, report);
      if (report.classification != Classification::NonCollision) {
        print_error(err, "verification", "classification is " + classification_name(report.classification));
        return kExitVerificationFailed;
      }
      return kExitOk;
    }

    if (*analyze) {
      bool did = false;
      auto need_n = [&]() {
        if (n < 1) throw ValidationError("--n", "--n is required for this analysis");
      };
      if (even_schedule) {
        need_n();
        const auto schedule = even_collision_schedule(n);
        if (schedule.empty()) out << "none\n";
        for (const auto& c : schedule) {
          out << "(" << c.first << "," << c.second << ")@" << c.time.as_period_fraction() << "\n";
        }
        did = true;
      }
      if (!dense.empty()) {
        out << (dense_set_contains(Rational::parse(dense)) ? "true" : "false") << "\n";
        did = true;
      }
      if (plan) {
        need_n();
        const auto p = plan_arrangement(n);
        out << "groups=";
        for (std::size_t g = 0; g < p.spec.groups.size(); ++g) out << (g ? "," : "") << p.spec.groups[g].size;
        out << " phases=";
        for (std::size_t g = 0; g < p.spec.groups.size(); ++g) {
          out << (g ? "," : "") << p.spec.groups[g].phase.as_period_fraction();
        }
        out << " k=" << p.k << "\n";
        for (const auto& w : p.warnings) out << "warning: " << w << "\n";
        did = true;
      }
      if (coprime_k != 0) {
        need_n();
        out << (coprime_phase_check(coprime_k, n) ? "true" : "false") << "\n";
        did = true;
      }
      if (!did) {
        print_error(err, "usage", "analyze needs one of --even-schedule, --dense-set, --plan, --coprime");
        return kExitUsage;
      }
      return kExitOk;
    }

    if (*plot) {
      RenderOptions opts;
      opts.density = density;
      opts.markers = !no_markers;
      opts.panels = split_list(panels);
      write_text_file(svg_path, render_svg(load_orbit(orbit_path), opts));
      return kExitOk;
    }

    if (*exp) {
      write_text_file(csv_path, export_csv(load_orbit(orbit_path), rows));
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    if (e.field().rfind("--", 0) == 0) {
      print_error(err, "usage", e.what());
      return kExitUsage;
    }
    print_error(err, e.category(), e.what());
    return kExitError;
  } catch (const Error& e) {
    print_error(err, e.category(), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace choreo
