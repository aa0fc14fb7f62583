#include "choreo/config.hpp"

#include <fstream>
#include <sstream>

#include "choreo/error.hpp"
#include "json_detail.hpp"

namespace choreo {

namespace detail {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    int line = 1, column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                       e.what());
  }
}

void check_keys(const json& obj, const std::string& pointer, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(pointer.empty() ? "/" : pointer, (pointer.empty() ? "/" : pointer) + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ValidationError(pointer + "/" + item.key(), "unknown field at " + pointer + "/" + item.key());
  }
}

const json& require(const json& obj, const std::string& pointer, const char* key) {
  if (!obj.contains(key)) throw ValidationError(pointer + "/" + key, "missing field " + pointer + "/" + key);
  return obj.at(key);
}

double get_number(const json& v, const std::string& pointer) {
  if (!v.is_number()) throw ValidationError(pointer, pointer + ": expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& pointer) {
  if (!v.is_number_integer()) throw ValidationError(pointer, pointer + ": expected an integer");
  return v.get<int>();
}

bool get_bool(const json& v, const std::string& pointer) {
  if (!v.is_boolean()) throw ValidationError(pointer, pointer + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& pointer) {
  if (!v.is_string()) throw ValidationError(pointer, pointer + ": expected a string");
  return v.get<std::string>();
}

json config_to_json(const ConfigDocument& doc) {
  json phases = json::array();
  for (const auto& g : doc.spec.groups) phases.push_back(g.phase.str());
  json j;
  j["masses"] = doc.masses;
  j["spec"] = {{"family", family_name(doc.spec.family)},
               {"phases", phases},
               {"zero_sum", doc.spec.zero_sum == ZeroSumMode::Coupled ? "coupled" : "per-group"}};
  j["exponent"] = doc.exponent;
  j["period"] = doc.period;
  j["resolution"] = {{"k_max", doc.resolution.k_max}, {"m_samples", doc.resolution.m_samples}};
  j["schedule"] = {{"delta_start", doc.schedule.delta_start},
                   {"factor", doc.schedule.factor},
                   {"delta_floor", doc.schedule.delta_floor},
                   {"polish", doc.schedule.polish}};
  const auto& o = doc.optimizer;
  j["optimizer"] = {{"max_iterations", o.max_iterations}, {"gradient_tolerance", o.gradient_tolerance},
                    {"stage_tolerance", o.stage_tolerance}, {"armijo_c1", o.armijo_c1},
                    {"contraction", o.contraction},       {"max_backtracks", o.max_backtracks},
                    {"memory", o.memory},                 {"progress_every", o.progress_every}};
  j["seed"] = doc.seed;
  j["perturbation"] = doc.perturbation;
  j["output"] = {{"orbit", doc.output.orbit}, {"csv", doc.output.csv}, {"svg", doc.output.svg}};
  return j;
}

ConfigDocument config_from_json(const json& j, const std::string& root) {
  check_keys(j, root, {"masses", "spec", "exponent", "period", "resolution", "schedule", "optimizer", "seed",
                       "perturbation", "output"});
  ConfigDocument doc;

  const std::string mp = root + "/masses";
  const json& masses = require(j, root, "masses");
  if (!masses.is_array() || masses.empty()) throw ValidationError("masses", mp + ": expected a non-empty list of groups");
  for (std::size_t g = 0; g < masses.size(); ++g) {
    const std::string gp = mp + "/" + std::to_string(g);
    if (!masses[g].is_array() || masses[g].empty()) throw ValidationError("masses", gp + ": expected a non-empty list");
    std::vector<double> group;
    for (std::size_t i = 0; i < masses[g].size(); ++i) {
      const std::string ip = gp + "/" + std::to_string(i);
      if (!masses[g][i].is_number()) throw ValidationError("masses", ip + ": expected a number");
      const double m = masses[g][i].get<double>();
      if (!(m > 0.0)) throw ValidationError("masses", "masses: " + ip + " must be positive");
      group.push_back(m);
    }
    doc.masses.push_back(std::move(group));
  }

  const std::string sp = root + "/spec";
  const json& spec = require(j, root, "spec");
  check_keys(spec, sp, {"family", "phases", "zero_sum"});
  doc.spec.family = family_from_name(get_string(require(spec, sp, "family"), sp + "/family"));
  std::vector<Rational> phases(doc.masses.size());
  if (spec.contains("phases")) {
    const json& ph = spec.at("phases");
    if (!ph.is_array() || ph.size() != doc.masses.size()) {
      throw ValidationError("spec.phases", sp + "/phases: expected one phase per mass group");
    }
    for (std::size_t g = 0; g < ph.size(); ++g) {
      const std::string pp = sp + "/phases/" + std::to_string(g);
      try {
        if (ph[g].is_array()) {
          // Integer pair [p, q].
          if (ph[g].size() != 2) throw ValidationError("spec.phases", pp + ": expected [p, q]");
          const int den = get_int(ph[g][1], pp + "/1");
          if (den == 0) throw ValidationError("spec.phases", pp + ": zero denominator");
          phases[g] = Rational(get_int(ph[g][0], pp + "/0"), den);
        } else {
          phases[g] = Rational::parse(get_string(ph[g], pp));
        }
      } catch (const ParseError& e) {
        throw ValidationError("spec.phases", pp + ": " + e.what());
      }
    }
  }
  for (std::size_t g = 0; g < doc.masses.size(); ++g) {
    doc.spec.groups.push_back({static_cast<int>(doc.masses[g].size()), phases[g]});
  }
  doc.spec.zero_sum = doc.spec.family == Family::Arrangement ? ZeroSumMode::Coupled : ZeroSumMode::PerGroup;
  if (spec.contains("zero_sum")) {
    const std::string z = get_string(spec.at("zero_sum"), sp + "/zero_sum");
    if (z == "coupled") {
      doc.spec.zero_sum = ZeroSumMode::Coupled;
    } else if (z == "per-group") {
      doc.spec.zero_sum = ZeroSumMode::PerGroup;
    } else {
      throw ValidationError("spec.zero_sum", sp + "/zero_sum: expected \"per-group\" or \"coupled\"");
    }
  }
  doc.spec.validate();

  if (j.contains("exponent")) doc.exponent = get_number(j.at("exponent"), root + "/exponent");
  if (j.contains("period")) doc.period = get_number(j.at("period"), root + "/period");

  doc.resolution = default_resolution(doc.spec);
  if (j.contains("resolution")) {
    const std::string rp = root + "/resolution";
    const json& r = j.at("resolution");
    check_keys(r, rp, {"k_max", "m_samples"});
    if (r.contains("k_max")) doc.resolution = default_resolution(doc.spec, get_int(r.at("k_max"), rp + "/k_max"));
    if (r.contains("m_samples")) doc.resolution.m_samples = get_int(r.at("m_samples"), rp + "/m_samples");
  }

  if (j.contains("schedule")) {
    const std::string p = root + "/schedule";
    const json& s = j.at("schedule");
    check_keys(s, p, {"delta_start", "factor", "delta_floor", "polish"});
    if (s.contains("delta_start")) doc.schedule.delta_start = get_number(s.at("delta_start"), p + "/delta_start");
    if (s.contains("factor")) doc.schedule.factor = get_number(s.at("factor"), p + "/factor");
    if (s.contains("delta_floor")) doc.schedule.delta_floor = get_number(s.at("delta_floor"), p + "/delta_floor");
    if (s.contains("polish")) doc.schedule.polish = get_bool(s.at("polish"), p + "/polish");
  }

  if (j.contains("optimizer")) {
    const std::string p = root + "/optimizer";
    const json& o = j.at("optimizer");
    check_keys(o, p, {"max_iterations", "gradient_tolerance", "stage_tolerance", "armijo_c1", "contraction",
                      "max_backtracks", "memory", "progress_every"});
    auto& op = doc.optimizer;
    if (o.contains("max_iterations")) op.max_iterations = get_int(o.at("max_iterations"), p + "/max_iterations");
    if (o.contains("gradient_tolerance")) {
      op.gradient_tolerance = get_number(o.at("gradient_tolerance"), p + "/gradient_tolerance");
    }
    if (o.contains("stage_tolerance")) op.stage_tolerance = get_number(o.at("stage_tolerance"), p + "/stage_tolerance");
    if (o.contains("armijo_c1")) op.armijo_c1 = get_number(o.at("armijo_c1"), p + "/armijo_c1");
    if (o.contains("contraction")) op.contraction = get_number(o.at("contraction"), p + "/contraction");
    if (o.contains("max_backtracks")) op.max_backtracks = get_int(o.at("max_backtracks"), p + "/max_backtracks");
    if (o.contains("memory")) op.memory = get_int(o.at("memory"), p + "/memory");
    if (o.contains("progress_every")) op.progress_every = get_int(o.at("progress_every"), p + "/progress_every");
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0)) {
      throw ValidationError(root + "/seed", root + "/seed: expected a non-negative integer");
    }
    doc.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("perturbation")) doc.perturbation = get_number(j.at("perturbation"), root + "/perturbation");

  if (j.contains("output")) {
    const std::string p = root + "/output";
    const json& o = j.at("output");
    check_keys(o, p, {"orbit", "csv", "svg"});
    if (o.contains("orbit")) doc.output.orbit = get_string(o.at("orbit"), p + "/orbit");
    if (o.contains("csv")) doc.output.csv = get_string(o.at("csv"), p + "/csv");
    if (o.contains("svg")) doc.output.svg = get_string(o.at("svg"), p + "/svg");
  }

  doc.validate();
  return doc;
}

}  // namespace detail

MassSystem ConfigDocument::mass_system() const {
  MassSystem sys;
  for (const auto& g : masses) sys.masses.insert(sys.masses.end(), g.begin(), g.end());
  sys.dim = spec.dim();
  sys.period = period;
  sys.exponent = exponent;
  return sys;
}

void ConfigDocument::validate() const {
  if (masses.size() != spec.groups.size()) throw ValidationError("masses", "masses: one list per group is required");
  for (std::size_t g = 0; g < masses.size(); ++g) {
    if (static_cast<int>(masses[g].size()) != spec.groups[g].size) {
      throw ValidationError("masses", "masses: group sizes disagree with the spec");
    }
  }
  spec.validate();
  mass_system().validate();
  if (resolution.k_max < 1) throw ValidationError("resolution.k_max", "resolution.k_max must be positive");
  if (resolution.m_samples % spec.lattice_modulus() != 0) {
    throw ValidationError("resolution.m_samples", "resolution.m_samples must be a multiple of " +
                                                      std::to_string(spec.lattice_modulus()));
  }
  if (resolution.m_samples < 2 * resolution.k_max + 2) {
    throw ValidationError("resolution.m_samples", "resolution.m_samples must be at least 2 k_max + 2");
  }
  schedule.validate();
  optimizer.validate();
  if (!(perturbation >= 0.0)) throw ValidationError("perturbation", "perturbation must be non-negative");
}

bool operator==(const ConfigDocument& a, const ConfigDocument& b) {
  return detail::config_to_json(a) == detail::config_to_json(b);
}

ConfigDocument parse_config(const std::string& text) { return detail::config_from_json(detail::parse_json(text)); }

std::string serialize_config(const ConfigDocument& doc) { return detail::config_to_json(doc).dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

ConfigDocument load_config(const std::string& path) { return parse_config(read_text_file(path)); }

void save_config(const ConfigDocument& doc, const std::string& path) { write_text_file(path, serialize_config(doc)); }

}  // namespace choreo
