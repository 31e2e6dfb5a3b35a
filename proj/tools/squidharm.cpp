#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"
#include "squidharm/io.hpp"
#include "squidharm/spectrum.hpp"

#ifndef SQUIDHARM_VERSION
#define SQUIDHARM_VERSION "0.0.0"
#endif

namespace {

using namespace squidharm;
using namespace squidharm::cli;
namespace c = squidharm::constants;

bool verbose = false;

void note(std::vector<std::string>& notes, const std::string& text) {
  notes.push_back(text);
  if (verbose) std::cerr << "note: " << text << '\n';
}

struct Output {
  std::optional<Table> table;
  json payload = json::object();
  std::vector<std::string> notes;
  std::string extension = "csv";
};

json table_json(const Table& t) {
  json j;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  if (!t.comments.empty()) j["comments"] = t.comments;
  return j;
}

const DeviceConfig& need_device(const RunConfig& cfg) {
  if (!cfg.device) throw ConfigError("config: this command needs a device block");
  return *cfg.device;
}

Output run_spectrum(const RunConfig& cfg) {
  const auto& dev = need_device(cfg);
  if (!cfg.spectrum || cfg.spectrum->flux.empty()) throw ConfigError("config: spectrum needs a sweep block with a flux grid");
  const auto& sp = *cfg.spectrum;
  SpectrumOptions opts;
  opts.basis = cfg.basis;
  const Spectrum s = transition_spectrum(dev.params, sp.flux, sp.gates, sp.levels, opts);

  Output out;
  Table t;
  t.columns = {"flux_phi0", "ng", "i", "j", "omega_GHz"};
  for (const auto& r : s.rows()) {
    if (r.j > 0 && !sp.include_excited) continue;
    t.add_row({r.flux_phi0, r.n_g, double(r.i), double(r.j), r.omega});
  }
  out.payload["charge_cutoff"] = s.basis.cutoff;
  out.payload["cutoff_converged"] = s.basis.converged;
  out.table = std::move(t);
  return out;
}

Output run_synth(const RunConfig& cfg) {
  const auto& dev = need_device(cfg);
  SynthOptions o = cfg.synth.value_or(SynthOptions{});
  o.seed = cfg.seed;
  const TransitionDataset data = synthesize_dataset(dev.params, o);
  Output out;
  out.table = dataset_table(data);
  out.payload["records"] = data.records.size();
  out.payload["noise_MHz"] = o.noise_mhz;
  return out;
}

Output run_fit(const RunConfig& cfg, const std::optional<std::string>& data_flag) {
  const FitConfig fc = cfg.fit.value_or(FitConfig{});
  const auto path = data_flag ? data_flag : fc.data;
  if (!path) throw ConfigError("fit: no dataset (use --data or fit.data)");
  const TransitionDataset data = dataset_from_table(read_csv_file(*path));
  try {
    data.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(*path + ": " + e.what());
  }

  Output out;
  out.extension = "json";
  FitOptions o = fc.options;
  o.seed = cfg.seed;
  o.basis = cfg.basis;
  FitVector init;
  if (fc.init) {
    init = *fc.init;
  } else if (cfg.device) {
    const auto& p = cfg.device->params;
    init = {p.E_C, p.E_J1_L, p.dE_J, p.alpha};
    if (!o.bounds.contains(init)) throw ConfigError("fit: device parameters lie outside the fit bounds");
  } else {
    data.check_identifiable();
    init = coarse_initial_guess(data, o.bounds);
    note(out.notes, "initial point from a coarse grid scan");
  }

  const FitResult r = fit_spectrum(data, init, o);
  json params = json::object();
  for (std::size_t k = 0; k < 4; ++k) params[fit_parameter_names[k]] = {{"value", r.x[k]}, {"sigma", r.sigma[k]}};
  out.payload["parameters"] = params;
  out.payload["initial"] = init;
  json cov = json::array();
  for (int a = 0; a < 4; ++a) {
    json row = json::array();
    for (int b = 0; b < 4; ++b) row.push_back(r.covariance(a, b));
    cov.push_back(row);
  }
  out.payload["covariance"] = cov;
  out.payload["cost_GHz2"] = r.cost;
  out.payload["reduced_chi2_GHz2"] = r.reduced_chi2;
  out.payload["degrees_of_freedom"] = r.degrees_of_freedom;
  out.payload["evaluations"] = r.evaluations;
  out.payload["restarts"] = r.restarts;
  out.payload["start_costs_GHz2"] = r.start_costs;
  out.payload["charge_cutoff"] = r.basis.cutoff;
  out.payload["asymmetry_percent"] = 100.0 * dEJ_to_asymmetry(r.x[2]);
  if (r.x[3] < 0.0) note(out.notes, "fitted alpha is negative");

  Table t;
  t.columns = {"flux_phi0", "i", "j", "ng", "freq_GHz", "model_GHz", "residual_GHz"};
  for (std::size_t k = 0; k < data.records.size(); ++k) {
    const auto& rec = data.records[k];
    t.add_row({rec.flux_phi0, double(rec.i), double(rec.j), rec.n_g, rec.frequency, rec.frequency + r.residuals[k],
               r.residuals[k]});
  }
  out.table = std::move(t);
  return out;
}

Output run_odr(const RunConfig& cfg, const std::optional<std::string>& data_flag) {
  const OdrConfig oc = cfg.odr.value_or(OdrConfig{});
  std::vector<LinePoint> points;
  Output out;
  out.extension = "json";
  if (data_flag || oc.data) {
    Table table = read_csv_file(*(data_flag ? data_flag : oc.data));
    if (table.has_column("asymmetry_percent")) {
      const std::size_t col = table.column("asymmetry_percent");
      const std::size_t ej = table.column("E_J1_GHz");
      std::vector<std::vector<double>> kept;
      json excluded = json::array();
      for (auto& row : table.rows) {
        if (std::abs(row[col]) > oc.max_asymmetry_percent) {
          excluded.push_back(row[ej]);
          note(out.notes, "excluded E_J1=" + format_number(row[ej]) + " GHz: asymmetry " + format_number(row[col]) + "%");
        } else {
          kept.push_back(std::move(row));
        }
      }
      table.rows = std::move(kept);
      out.payload["excluded_E_J1_GHz"] = excluded;
    }
    points = ratio_points_from_table(table);
  } else if (oc.synthetic) {
    const auto& s = *oc.synthetic;
    points = synthesize_ratio_points(s.E_J1, s.L_pH, s.beta, s.relative_noise, cfg.seed);
    note(out.notes, "synthetic ratio points");
  } else {
    throw ConfigError("odr: no data (use --data, odr.data or odr.synthetic)");
  }
  const LineFitResult r = deming_fit(points);
  const InductanceBeta ib = inductance_and_beta(r);
  out.payload["slope_per_GHz"] = r.slope;
  out.payload["slope_sigma_per_GHz"] = r.slope_sigma;
  out.payload["intercept"] = r.intercept;
  out.payload["intercept_sigma"] = r.intercept_sigma;
  out.payload["covariance"] = r.covariance;
  out.payload["chi2"] = r.chi2;
  out.payload["reduced_chi2"] = r.reduced_chi2;
  out.payload["points"] = r.points;
  out.payload["L_physical"] = ib.L_physical;
  if (ib.L_physical) {
    out.payload["L_pH"] = ib.L_pH;
    out.payload["L_sigma_pH"] = ib.L_sigma;
    out.payload["E_L_GHz"] = ib.E_L;
  } else {
    note(out.notes, "non-positive slope: no physical inductance");
  }
  out.payload["beta"] = ib.beta;
  out.payload["beta_sigma"] = ib.beta_sigma;
  out.table = ratio_table(points);
  return out;
}

Output run_diode(const RunConfig& cfg) {
  const auto& dev = need_device(cfg);
  if (!cfg.diode) throw ConfigError("config: diode needs a diode block");
  const DiodeReport r = diode_scan(dev.params, cfg.diode->flux, cfg.diode->grid_points);
  Output out;
  Table t;
  t.columns = {"flux_phi0", "I_max_uA", "I_min_uA", "eta"};
  std::size_t best = 0;
  for (std::size_t k = 0; k < r.flux.size(); ++k) {
    t.add_row({r.flux[k], r.I_max[k], r.I_min[k], r.eta[k]});
    if (r.eta[k] > r.eta[best]) best = k;
  }
  out.payload["max_eta"] = r.eta[best];
  out.payload["max_eta_flux_phi0"] = r.flux[best];
  out.table = std::move(t);
  return out;
}

Output run_multimode(const RunConfig& cfg) {
  if (!cfg.multimode) throw ConfigError("config: multimode needs a multimode block");
  const auto& m = *cfg.multimode;
  Output out;
  Table t;
  t.columns = {m.model == "full_squid" ? "flux_phi0" : "C_J_fF", "k", "full_GHz", "approx_GHz", "abs_diff_GHz"};
  auto emit = [&](double key, const DiscrepancyTable& d, std::size_t row) {
    for (int k = 0; k < d.transitions; ++k)
      t.add_row({key, double(k + 1), d.full[row](k), d.approx[row](k), std::abs(d.full[row](k) - d.approx[row](k))});
  };
  double worst = 0.0;

  if (m.model == "full_squid") {
    const auto& dev = need_device(cfg);
    double L;
    if (m.E_L) {
      L = c::inductance_ph(*m.E_L);
    } else if (m.L_pH) {
      L = *m.L_pH;
    } else if (dev.L_pH) {
      L = *dev.L_pH;
    } else {
      throw ConfigError("multimode: no series inductance (L_pH or E_L_GHz)");
    }
    const auto C_sh = m.C_sh_fF ? m.C_sh_fF : dev.C_sh_fF;
    if (!C_sh) throw ConfigError("multimode: no shunt capacitance (C_sh_fF)");
    const auto& p = dev.params;
    FullSquidCircuit circuit;
    try {
      circuit = FullSquidCircuit::from_device(p.E_C, p.E_J1_L, p.E_J1_R(), L, *C_sh, m.left_fraction);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("multimode: ") + e.what());
    }
    const DiscrepancyTable d = model_discrepancy(circuit, m.flux, m.n_g, m.transitions, m.options);
    for (std::size_t row = 0; row < d.flux.size(); ++row) emit(d.flux[row], d, row);
    worst = d.overall_max();
    out.payload["C_J_fF"] = circuit.C_J();
    out.payload["L_pH"] = L;
  } else {
    const double L = m.E_L ? c::inductance_ph(*m.E_L) : *m.L_pH;
    for (double cj : m.C_J_fF) {
      TransmonInductorCircuit circuit{m.C_fF, cj, L, m.E_J, m.n_g};
      const DiscrepancyTable d = model_discrepancy(circuit, m.transitions, m.options);
      emit(cj, d, 0);
      worst = std::max(worst, d.overall_max());
    }
  }
  out.payload["max_abs_diff_GHz"] = worst;
  out.table = std::move(t);
  return out;
}

Output run_dispersive(const RunConfig& cfg) {
  const auto& dev = need_device(cfg);
  if (!cfg.dispersive) throw ConfigError("config: dispersive needs a dispersive block");
  const auto& d = *cfg.dispersive;
  const auto omega_r = d.omega_r ? d.omega_r : dev.omega_r;
  const auto g_c = d.g_c ? d.g_c : dev.g_c;
  if (!omega_r || !g_c) throw ConfigError("dispersive: omega_r_GHz and g_c_MHz are required");
  DispersiveOptions o = d.options;
  o.basis = cfg.basis;
  const DispersiveComparison r = dispersive_sweep(dev.params, d.flux, *omega_r, *g_c, o);

  Output out;
  Table t;
  t.columns = {"flux_phi0", "shift_perturbative_GHz", "shift_exact_GHz", "device_shift_GHz"};
  for (std::size_t k = 0; k < r.exact.flux.size(); ++k)
    t.add_row({r.exact.flux[k], r.perturbative.shift[k], r.exact.shift[k], r.exact.device_shift[k]});
  for (const auto& w : r.perturbative.warnings) note(out.notes, w);
  for (const auto& w : r.exact.warnings) note(out.notes, w);
  out.payload["omega_r_GHz"] = *omega_r;
  out.payload["g_c_GHz"] = *g_c;
  out.payload["state"] = o.state;
  out.table = std::move(t);
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int exit_code(const squidharm::Error& e) {
  return e.kind() == ErrorKind::invalid_argument ? 2 : static_cast<int>(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, fits and diagnostics for capacitively shunted SQUIDs with second harmonics"};
  app.set_version_flag("--version", SQUIDHARM_VERSION);
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> data_path;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output file (.json for a result envelope, otherwise CSV)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "diagnostics on stderr");
  app.require_subcommand(1);
  app.fallthrough();

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "transition table over the sweep grid"},
      {"fit", "fit (E_C, E_J1, dE_J, alpha) to a transition dataset"},
      {"odr", "errors-in-variables line through (E_J1, ratio) points"},
      {"synth", "synthetic transition dataset over both flux ranges"},
      {"diode", "supercurrent extrema and rectification efficiency"},
      {"multimode", "full-circuit vs second-harmonic discrepancy"},
      {"dispersive", "resonator shift, perturbative and dressed"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "fit" || name == "odr") sub->add_option("--data", data_path, "input table");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = config_path.empty() ? parse_config(json::object(), ".") : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    cfg.echo["seed"] = cfg.seed;
    if (cfg.threads) set_thread_count(*cfg.threads);

    Output out;
    if (command == "spectrum") out = run_spectrum(cfg);
    else if (command == "synth") out = run_synth(cfg);
    else if (command == "fit") out = run_fit(cfg, data_path);
    else if (command == "odr") out = run_odr(cfg, data_path);
    else if (command == "diode") out = run_diode(cfg);
    else if (command == "multimode") out = run_multimode(cfg);
    else out = run_dispersive(cfg);

    const std::string path = !out_path.empty() ? out_path : cfg.out.value_or(command + "." + out.extension);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ends_with(path, ".json")) {
      json env;
      env["command"] = command;
      env["version"] = SQUIDHARM_VERSION;
      env["config"] = cfg.echo;
      env["wall_time_s"] = wall;
      env["payload"] = out.payload;
      if (out.table) env["payload"]["table"] = table_json(*out.table);
      env["notes"] = out.notes;
      atomic_write(path, env.dump(2) + "\n");
    } else {
      if (!out.table) throw ConfigError(command + ": no table output; use a .json path");
      atomic_write(path, to_csv(*out.table));
    }
    if (verbose) std::cerr << command << ": wrote " << path << " in " << wall << " s\n";
    return 0;
  } catch (const squidharm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
