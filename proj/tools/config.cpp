#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"

namespace squidharm::cli {

namespace c = constants;

Section::Section(const json& node, std::string where) : node_(&node), where_(std::move(where)) {
  if (!node.is_object()) throw ConfigError(where_ + ": expected an object");
}

bool Section::has(const std::string& key) const { return node_->contains(key); }

const json& Section::at(const std::string& key) {
  if (!node_->contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
  used_.insert(key);
  return (*node_)[key];
}

const json& Section::raw(const std::string& key) { return at(key); }

double Section::number(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where_ + "." + key + ": must be finite");
  return d;
}

double Section::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

std::optional<double> Section::optional_number(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return number(key);
}

int Section::integer(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
  return v.get<int>();
}

bool Section::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string Section::text(const std::string& key) {
  const json& v = at(key);
  if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> Section::numbers(const std::string& key) {
  const json& v = at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where_ + "." + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(where_ + "." + key + ": expected a number or an array of numbers");
  }
  for (double d : out)
    if (!std::isfinite(d)) throw ConfigError(where_ + "." + key + ": must be finite");
  return out;
}

Section Section::child(const std::string& key) { return Section(at(key), where_ + "." + key); }

void Section::finish() const {
  std::string unknown;
  for (const auto& [key, value] : node_->items())
    if (!used_.count(key)) unknown += (unknown.empty() ? "'" : ", '") + key + "'";
  if (!unknown.empty()) throw ConfigError(where_ + ": unknown key(s) " + unknown);
}

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// Either an explicit list or start/stop/points.
std::optional<std::vector<double>> flux_grid(Section& s) {
  if (s.has("flux_phi0")) {
    check(!s.has("flux_start_phi0") && !s.has("flux_stop_phi0") && !s.has("points"),
          s.where() + ": give either flux_phi0 or flux_start_phi0/flux_stop_phi0/points");
    auto f = s.numbers("flux_phi0");
    check(!f.empty(), s.where() + ".flux_phi0: empty");
    return f;
  }
  if (!s.has("flux_start_phi0") && !s.has("flux_stop_phi0") && !s.has("points")) return std::nullopt;
  const double a = s.number("flux_start_phi0");
  const double b = s.number("flux_stop_phi0");
  const int n = s.integer("points", 0);
  check(n >= 1, s.where() + ".points: must be at least 1");
  check(n == 1 || b > a, s.where() + ": flux_stop_phi0 must exceed flux_start_phi0");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return out;
}

std::vector<double> grid_or(Section& s, const std::optional<std::vector<double>>& fallback) {
  if (auto g = flux_grid(s)) return *g;
  if (fallback) return *fallback;
  throw ConfigError(s.where() + ": no flux grid (set flux_phi0 or flux_start_phi0/flux_stop_phi0/points here or in sweep)");
}

struct Shared {
  std::optional<double> L_pH;
  std::optional<double> C_sh_fF;
};

DeviceConfig parse_device(Section s, const std::string& name, const Shared& shared) {
  DeviceConfig d;
  d.name = name;
  s.optional_number("JJ_length_um");
  auto& p = d.params;
  p.E_C = s.number("E_C_GHz");
  p.E_J1_L = s.number("E_J1_L_GHz");
  check(!(s.has("dE_J") && s.has("asymmetry_percent")), s.where() + ": give dE_J or asymmetry_percent, not both");
  if (s.has("dE_J")) p.dE_J = s.number("dE_J");
  if (s.has("asymmetry_percent")) p.dE_J = asymmetry_to_dEJ(s.number("asymmetry_percent") / 100.0);
  check(!(s.has("alpha") && s.has("L_pH")), s.where() + ": give alpha or L_pH, not both");
  d.L_pH = s.optional_number("L_pH");
  if (!d.L_pH && !s.has("alpha")) d.L_pH = shared.L_pH;
  if (s.has("alpha")) {
    p.alpha = s.number("alpha");
  } else if (d.L_pH) {
    check(*d.L_pH > 0.0, s.where() + ".L_pH: must be positive");
    p.alpha = p.E_J1_L / (4.0 * c::inductive_energy_ghz(*d.L_pH));
  }
  p.alpha_right = s.optional_number("alpha_right");
  p.n_g = s.number("n_g", 0.0);
  d.omega_r = s.optional_number("omega_r_GHz");
  if (auto g = s.optional_number("g_c_MHz")) d.g_c = *g * 1e-3;
  d.C_sh_fF = s.optional_number("C_sh_fF");
  if (!d.C_sh_fF) d.C_sh_fF = shared.C_sh_fF;
  s.finish();
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.where() + ": " + e.what());
  }
  return d;
}

FitVector fit_vector(Section s) {
  FitVector x;
  for (std::size_t k = 0; k < 4; ++k) x[k] = s.number(fit_parameter_names[k]);
  s.finish();
  return x;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string resolve(const std::filesystem::path& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(const json& document, const std::filesystem::path& base_dir) {
  check(document.is_object(), "config: top level must be an object");
  json doc = document;

  // Import a device table (and shared constants) from another file.
  if (doc.contains("chip")) {
    check(doc["chip"].is_string(), "config.chip: expected a path");
    const std::string chip_path = resolve(base_dir, doc["chip"].get<std::string>());
    const json chip = read_json(chip_path);
    check(chip.is_object(), chip_path + ": top level must be an object");
    for (const char* key : {"devices", "shared"}) {
      if (!chip.contains(key)) continue;
      json merged = chip[key];
      if (doc.contains(key)) merged.update(doc[key]);
      doc[key] = merged;
    }
    doc.erase("chip");
  }

  RunConfig cfg;
  cfg.echo = doc;
  Section top(doc, "config");

  Shared shared;
  if (top.has("shared")) {
    Section s = top.child("shared");
    shared.L_pH = s.optional_number("L_pH");
    shared.C_sh_fF = s.optional_number("C_sh_fF");
    s.finish();
  }

  std::map<std::string, DeviceConfig> rows;
  if (top.has("devices")) {
    const json& table = top.raw("devices");
    check(table.is_object(), "config.devices: expected an object of named rows");
    for (const auto& [name, row] : table.items()) rows.emplace(name, parse_device(Section(row, "config.devices." + name), name, shared));
  }
  if (top.has("device")) {
    const json& d = top.raw("device");
    if (d.is_string()) {
      const auto it = rows.find(d.get<std::string>());
      check(it != rows.end(), "config.device: no row named '" + d.get<std::string>() + "' in devices");
      cfg.device = it->second;
    } else {
      cfg.device = parse_device(Section(d, "config.device"), "device", shared);
    }
  }

  if (top.has("basis")) {
    Section s = top.child("basis");
    const int cutoff = s.integer("cutoff", 0);
    check(cutoff >= 1, "config.basis.cutoff: must be a positive integer");
    cfg.basis = ChargeBasisSpec{cutoff, false};
    s.finish();
  }

  std::optional<std::vector<double>> sweep_flux;
  if (top.has("sweep")) {
    Section s = top.child("sweep");
    SpectrumConfig sp;
    sweep_flux = flux_grid(s);
    if (sweep_flux) sp.flux = *sweep_flux;
    if (s.has("gates")) sp.gates = s.numbers("gates");
    for (double g : sp.gates) check(g == 0.0 || g == 0.5, "config.sweep.gates: n_g must be 0 or 0.5");
    sp.levels = s.integer("levels", sp.levels);
    check(sp.levels >= 2, "config.sweep.levels: must be at least 2");
    sp.include_excited = s.boolean("include_excited", sp.include_excited);
    s.finish();
    cfg.spectrum = sp;
  }

  if (top.has("synth")) {
    Section s = top.child("synth");
    SynthOptions o;
    o.near_points = s.integer("near_points", o.near_points);
    o.far_points = s.integer("far_points", o.far_points);
    o.levels = s.integer("levels", o.levels);
    o.include_excited = s.boolean("include_excited", o.include_excited);
    if (s.has("gates")) o.gates = s.numbers("gates");
    o.noise_mhz = s.number("noise_MHz", 0.0);
    o.near_max = s.number("near_max_GHz", o.near_max);
    o.far_low = s.number("far_low_GHz", o.far_low);
    o.far_high = s.number("far_high_GHz", o.far_high);
    s.finish();
    check(o.near_points >= 1 && o.far_points >= 1, "config.synth: point counts must be positive");
    check(o.levels >= 2, "config.synth.levels: must be at least 2");
    check(o.noise_mhz >= 0.0, "config.synth.noise_MHz: must be nonnegative");
    for (double g : o.gates) check(g == 0.0 || g == 0.5, "config.synth.gates: n_g must be 0 or 0.5");
    cfg.synth = o;
  }

  if (top.has("fit")) {
    Section s = top.child("fit");
    FitConfig f;
    if (s.has("data")) f.data = resolve(base_dir, s.text("data"));
    if (s.has("init")) f.init = fit_vector(s.child("init"));
    auto& o = f.options;
    o.starts = s.integer("starts", o.starts);
    o.start_evaluations = s.integer("start_evaluations", o.start_evaluations);
    o.max_evaluations = s.integer("max_evaluations", o.max_evaluations);
    o.max_restarts = s.integer("max_restarts", o.max_restarts);
    o.start_spread = s.number("start_spread", o.start_spread);
    o.x_tolerance = s.number("x_tolerance", o.x_tolerance);
    o.f_tolerance = s.number("f_tolerance_GHz2", o.f_tolerance);
    o.per_arm_alpha = s.boolean("per_arm_alpha", o.per_arm_alpha);
    if (s.has("lower")) o.bounds.lower = fit_vector(s.child("lower"));
    if (s.has("upper")) o.bounds.upper = fit_vector(s.child("upper"));
    s.finish();
    check(o.starts >= 1 && o.start_evaluations >= 1 && o.max_evaluations >= 1 && o.max_restarts >= 0,
          "config.fit: iteration budgets must be positive");
    check(o.start_spread > 0.0 && o.start_spread <= 0.5, "config.fit.start_spread: must lie in (0, 0.5]");
    for (std::size_t k = 0; k < 4; ++k)
      check(o.bounds.lower[k] < o.bounds.upper[k], "config.fit: lower bound must be below upper bound");
    if (f.init) check(o.bounds.contains(*f.init), "config.fit.init: outside the bounds");
    cfg.fit = f;
  }

  if (top.has("odr")) {
    Section s = top.child("odr");
    OdrConfig o;
    if (s.has("data")) o.data = resolve(base_dir, s.text("data"));
    o.max_asymmetry_percent = s.number("max_asymmetry_percent", o.max_asymmetry_percent);
    check(o.max_asymmetry_percent > 0.0, "config.odr.max_asymmetry_percent: must be positive");
    if (s.has("synthetic")) {
      Section y = s.child("synthetic");
      OdrSynthetic syn;
      syn.E_J1 = y.numbers("E_J1_GHz");
      syn.L_pH = y.number("L_pH", syn.L_pH);
      syn.beta = y.number("beta", syn.beta);
      syn.relative_noise = y.number("relative_noise", syn.relative_noise);
      y.finish();
      check(syn.L_pH > 0.0, "config.odr.synthetic.L_pH: must be positive");
      check(syn.relative_noise > 0.0, "config.odr.synthetic.relative_noise: must be positive");
      o.synthetic = syn;
    }
    s.finish();
    check(!(o.data && o.synthetic), "config.odr: give data or synthetic, not both");
    cfg.odr = o;
  }

  if (top.has("diode")) {
    Section s = top.child("diode");
    DiodeConfig d;
    d.flux = grid_or(s, sweep_flux);
    d.grid_points = s.integer("grid_points", d.grid_points);
    s.finish();
    check(d.grid_points >= 1024, "config.diode.grid_points: at least 1024 required");
    cfg.diode = d;
  }

  if (top.has("multimode")) {
    Section s = top.child("multimode");
    MultimodeConfig m;
    m.model = s.has("model") ? s.text("model") : m.model;
    check(m.model == "full_squid" || m.model == "transmon_inductor",
          "config.multimode.model: expected 'full_squid' or 'transmon_inductor'");
    m.transitions = s.integer("transitions", m.transitions);
    m.n_g = s.number("n_g", m.n_g);
    m.L_pH = s.optional_number("L_pH");
    m.E_L = s.optional_number("E_L_GHz");
    check(!(m.L_pH && m.E_L), "config.multimode: give L_pH or E_L_GHz, not both");
    if (m.E_L) check(*m.E_L > 0.0, "config.multimode.E_L_GHz: must be positive");
    auto& o = m.options;
    o.dimension_cap = s.number("dimension_cap", o.dimension_cap);
    if (m.model == "full_squid") {
      m.flux = grid_or(s, sweep_flux);
      m.C_sh_fF = s.optional_number("C_sh_fF");
      m.left_fraction = s.number("left_fraction", m.left_fraction);
      o.full_dims.d_theta = s.integer("d_theta", o.full_dims.d_theta);
      o.full_dims.d_phi = s.integer("d_phi", o.full_dims.d_phi);
      o.full_dims.charge_cutoff = s.integer("charge_cutoff", o.full_dims.charge_cutoff);
    } else {
      m.C_fF = s.number("C_fF");
      m.C_J_fF = s.numbers("C_J_fF");
      m.E_J = s.number("E_J_GHz");
      o.transmon_dims.d_L = s.integer("d_L", o.transmon_dims.d_L);
      o.transmon_dims.charge_cutoff = s.integer("charge_cutoff", o.transmon_dims.charge_cutoff);
      check(m.L_pH || m.E_L, "config.multimode: transmon_inductor needs L_pH or E_L_GHz");
    }
    s.finish();
    check(m.transitions >= 1, "config.multimode.transitions: must be positive");
    check(m.n_g == 0.0 || m.n_g == 0.5, "config.multimode.n_g: must be 0 or 0.5");
    cfg.multimode = m;
  }

  if (top.has("dispersive")) {
    Section s = top.child("dispersive");
    DispersiveConfig d;
    d.flux = grid_or(s, sweep_flux);
    d.omega_r = s.optional_number("omega_r_GHz");
    if (auto g = s.optional_number("g_c_MHz")) d.g_c = *g * 1e-3;
    auto& o = d.options;
    o.level_cap = s.integer("level_cap", o.level_cap);
    o.photon_cutoff = s.integer("photon_cutoff", o.photon_cutoff);
    o.state = s.integer("state", o.state);
    o.tracked_levels = s.integer("tracked_levels", o.tracked_levels);
    s.finish();
    check(o.level_cap >= 2 && o.photon_cutoff >= 3 && o.state >= 0 && o.state < o.level_cap &&
              o.tracked_levels >= 2 && o.tracked_levels <= o.level_cap,
          "config.dispersive: inconsistent level or photon truncation");
    if (d.g_c) check(*d.g_c >= 0.0, "config.dispersive.g_c_MHz: must be nonnegative");
    cfg.dispersive = d;
  }

  if (top.has("seed")) {
    const json& v = top.raw("seed");
    check(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), "config.seed: expected a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  if (top.has("threads")) {
    cfg.threads = top.integer("threads", 0);
    check(*cfg.threads >= 0, "config.threads: must be nonnegative");
  }
  if (top.has("output")) cfg.out = resolve(base_dir, top.text("output"));
  top.finish();
  if (cfg.fit && cfg.fit->data) cfg.echo["fit"]["data"] = *cfg.fit->data;
  if (cfg.odr && cfg.odr->data) cfg.echo["odr"]["data"] = *cfg.odr->data;
  cfg.echo.erase("output");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  const std::filesystem::path p(path);
  return parse_config(read_json(p), p.has_parent_path() ? p.parent_path() : std::filesystem::path("."));
}

}  // namespace squidharm::cli
