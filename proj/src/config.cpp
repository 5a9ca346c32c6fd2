#include "vmlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace vmlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + what);
}

double to_double(const ConfigEntry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) fail(e.line, "'" + e.key + "' expects a number");
  return v;
}

long long to_integer(const ConfigEntry& e) {
  long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail(e.line, "'" + e.key + "' expects an integer");
  return v;
}

int to_int(const ConfigEntry& e) {
  const long long v = to_integer(e);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(e.line, "'" + e.key + "' out of range");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const ConfigEntry& e) {
  std::uint64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail(e.line, "'" + e.key + "' expects an unsigned integer");
  return v;
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(e.line, "'" + e.key + "' expects true or false");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const ConfigEntry& e) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_double({e.key, item, e.line}));
  if (out.empty()) fail(e.line, "'" + e.key + "' expects a comma-separated list of numbers");
  return out;
}

using Setter = std::function<void(const ConfigEntry&)>;

void apply(const ConfigSection& sec, const std::map<std::string, Setter>& setters) {
  for (const auto& e : sec.entries) {
    auto it = setters.find(e.key);
    if (it == setters.end()) fail(e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
    it->second(e);
  }
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile f;
  f.sections.push_back({"general", 0, {}});
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (!valid_name(name)) fail(line, "bad section name '" + name + "'");
      f.sections.push_back({name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    ConfigEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    // Trailing comments need whitespace before the marker.
    for (const char* marker : {" #", "\t#"}) {
      const auto c = e.value.find(marker);
      if (c != std::string::npos) e.value = trim(e.value.substr(0, c));
    }
    if (!valid_name(e.key)) fail(line, "bad key '" + e.key + "'");
    if (e.value.empty()) fail(line, "empty value for '" + e.key + "'");
    auto& sec = f.sections.back();
    for (const auto& prev : sec.entries)
      if (prev.key == e.key) fail(line, "repeated key '" + e.key + "' (first on line " + std::to_string(prev.line) + ")");
    sec.entries.push_back(std::move(e));
  }
  return f;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  return parse(in);
}

DriverSettings settings_from(const ConfigFile& file, DriverSettings s) {
  bool species_seen = false;
  std::set<std::string> seen;
  for (const auto& sec : file.sections) {
    if (sec.name != "species" && sec.name != "general" && !seen.insert(sec.name).second)
      fail(sec.line, "repeated section [" + sec.name + "]");
    if (sec.name == "general") {
      apply(sec, {{"seed", [&](const ConfigEntry& e) { s.seed = to_u64(e); }},
                  {"calibration", [&](const ConfigEntry& e) { s.calibration_file = e.value; }}});
    } else if (sec.name == "tolerances") {
      for (const auto& e : sec.entries) {
        try {
          s.tolerances.set(e.key, to_double(e));
        } catch (const Error& err) {
          fail(e.line, err.what());
        }
      }
    } else if (sec.name == "commutation") {
      apply(sec, {{"n", [&](const ConfigEntry& e) { s.commutation.n = to_int(e); }},
                  {"functions", [&](const ConfigEntry& e) { s.commutation.functions = to_int(e); }},
                  {"points", [&](const ConfigEntry& e) { s.commutation.points = to_int(e); }}});
    } else if (sec.name == "weights") {
      apply(sec, {{"n", [&](const ConfigEntry& e) { s.weights.n = to_int(e); }},
                  {"characteristics", [&](const ConfigEntry& e) { s.weights.characteristics = to_int(e); }},
                  {"t_end", [&](const ConfigEntry& e) { s.weights.t_end = to_double(e); }}});
    } else if (sec.name == "free_decay") {
      apply(sec, {{"n", [&](const ConfigEntry& e) { s.free_decay.n = to_int(e); }},
                  {"t_min", [&](const ConfigEntry& e) { s.free_decay.t_min = to_double(e); }},
                  {"t_max", [&](const ConfigEntry& e) { s.free_decay.t_max = to_double(e); }},
                  {"samples", [&](const ConfigEntry& e) { s.free_decay.samples = to_int(e); }}});
    } else if (sec.name == "theorem5") {
      apply(sec, {{"n", [&](const ConfigEntry& e) { s.theorem5.n = to_int(e); }},
                  {"data", [&](const ConfigEntry& e) { s.theorem5.data = split_list(e.value); }},
                  {"field", [&](const ConfigEntry& e) { s.theorem5.field = to_double(e); }},
                  {"times", [&](const ConfigEntry& e) { s.theorem5.times = to_doubles(e); }}});
    } else if (sec.name == "field_decay") {
      apply(sec, {{"n", [&](const ConfigEntry& e) { s.field_decay.n = to_int(e); }},
                  {"times", [&](const ConfigEntry& e) { s.field_decay.times = to_doubles(e); }}});
    } else if (sec.name == "potential") {
      apply(sec, {{"points", [&](const ConfigEntry& e) { s.potential_points = to_int(e); }}});
    } else if (sec.name == "counterexample") {
      apply(sec, {{"n", [&](const ConfigEntry& e) { s.counterexample.n = to_int(e); }},
                  {"count", [&](const ConfigEntry& e) { s.counterexample.count = to_int(e); }},
                  {"eta_min", [&](const ConfigEntry& e) { s.counterexample.eta_min = to_double(e); }},
                  {"eta_max", [&](const ConfigEntry& e) { s.counterexample.eta_max = to_double(e); }}});
    } else if (sec.name == "maxwell") {
      apply(sec, {{"points", [&](const ConfigEntry& e) { s.maxwell_points = to_int(e); }},
                  {"steps", [&](const ConfigEntry& e) { s.maxwell_steps = to_int(e); }}});
    } else if (sec.name == "simulation") {
      auto& c = s.simulation;
      apply(sec, {{"n", [&](const ConfigEntry& e) { c.n = to_int(e); }},
                  {"coupled_dim", [&](const ConfigEntry& e) { c.coupled_dim = to_int(e); }},
                  {"length", [&](const ConfigEntry& e) { c.length = to_double(e); }},
                  {"cells", [&](const ConfigEntry& e) { c.cells = to_int(e); }},
                  {"dt", [&](const ConfigEntry& e) { c.dt = to_double(e); }},
                  {"t_end", [&](const ConfigEntry& e) { c.t_end = to_double(e); }},
                  {"background", [&](const ConfigEntry& e) { c.background = to_double(e); }},
                  {"seed", [&](const ConfigEntry& e) { c.seed = to_u64(e); }},
                  {"record_every", [&](const ConfigEntry& e) { c.record_every = to_int(e); }},
                  {"velocity_floor", [&](const ConfigEntry& e) { c.velocity_floor = to_double(e); }}});
    } else if (sec.name == "species") {
      if (!species_seen) s.simulation.species.clear();
      species_seen = true;
      SpeciesSpec sp;
      apply(sec, {{"name", [&](const ConfigEntry& e) { sp.name = e.value; }},
                  {"mass", [&](const ConfigEntry& e) { sp.mass = to_double(e); }},
                  {"charge", [&](const ConfigEntry& e) { sp.charge = to_double(e); }},
                  {"density", [&](const ConfigEntry& e) { sp.density = to_double(e); }},
                  {"amplitude", [&](const ConfigEntry& e) { sp.amplitude = to_double(e); }},
                  {"mode", [&](const ConfigEntry& e) { sp.mode = to_int(e); }},
                  {"drift", [&](const ConfigEntry& e) { sp.drift = to_double(e); }},
                  {"thermal", [&](const ConfigEntry& e) { sp.thermal = to_double(e); }},
                  {"particles", [&](const ConfigEntry& e) { sp.particles = to_int(e); }},
                  {"mobile", [&](const ConfigEntry& e) { sp.mobile = to_bool(e); }}});
      s.simulation.species.push_back(sp);
    } else {
      fail(sec.line, "unknown section [" + sec.name + "]");
    }
  }
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_reports_csv(std::ostream& out, const ScenarioResult& r) {
  out << "check,lhs,rhs,ratio,threshold,verdict,params\r\n";
  out << std::setprecision(17);
  for (const auto& rep : r.reports) {
    std::ostringstream params;
    params << std::setprecision(17);
    for (std::size_t k = 0; k < rep.params.size(); ++k) params << (k ? ";" : "") << rep.params[k].first << '=' << rep.params[k].second;
    out << csv_field(rep.check) << ',' << rep.lhs << ',' << rep.rhs << ',' << rep.ratio << ',' << rep.threshold << ','
        << (rep.verdict ? "true" : "false") << ',' << csv_field(params.str()) << "\r\n";
  }
}

void write_timeseries_csv(std::ostream& out, const RunRecord& rec) {
  out << "t,field_energy,kinetic_energy,total_energy,gauss_residual,momentum,particle_norm,mean_field\r\n";
  out << std::setprecision(17);
  const auto total = rec.total_energy();
  for (std::size_t k = 0; k < rec.t.size(); ++k)
    out << rec.t[k] << ',' << rec.field_energy[k] << ',' << rec.kinetic_energy[k] << ',' << total[k] << ','
        << rec.gauss_residual[k] << ',' << rec.momentum[k] << ',' << rec.particle_norm[k] << ',' << rec.mean_field[k]
        << "\r\n";
}

}  // namespace vmlab
