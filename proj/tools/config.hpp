#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "squidharm/fitting.hpp"
#include "squidharm/multimode.hpp"
#include "squidharm/observables.hpp"

namespace squidharm::cli {

using json = nlohmann::json;

// Typed view of one JSON object that remembers which keys were read, so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string where);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::optional<double> optional_number(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key);
  std::vector<double> numbers(const std::string& key);
  Section child(const std::string& key);
  const json& raw(const std::string& key);
  const std::string& where() const { return where_; }

  // ConfigError listing every key that was never read.
  void finish() const;

 private:
  const json& at(const std::string& key);
  const json* node_;
  std::string where_;
  std::set<std::string> used_;
};

struct DeviceConfig {
  std::string name;
  SquidParams params;
  std::optional<double> omega_r;  // GHz
  std::optional<double> g_c;      // GHz
  std::optional<double> L_pH;
  std::optional<double> C_sh_fF;
};

struct SpectrumConfig {
  std::vector<double> flux;
  std::vector<double> gates{0.0, 0.5};
  int levels = 4;
  bool include_excited = true;
};

struct FitConfig {
  std::optional<std::string> data;
  std::optional<FitVector> init;  // empty: device parameters, else a coarse scan
  FitOptions options;
};

struct OdrSynthetic {
  std::vector<double> E_J1;
  double L_pH = 10.0;
  double beta = 0.0;
  double relative_noise = 0.05;
};

struct OdrConfig {
  std::optional<std::string> data;
  std::optional<OdrSynthetic> synthetic;
  // Rows of a data table with |asymmetry_percent| above this are left out.
  double max_asymmetry_percent = 5.0;
};

struct DiodeConfig {
  std::vector<double> flux;
  int grid_points = 2048;
};

struct MultimodeConfig {
  std::string model = "full_squid";  // or "transmon_inductor"
  std::vector<double> flux;
  double n_g = 0.0;
  int transitions = 4;
  std::optional<double> L_pH;
  std::optional<double> E_L;  // GHz, overrides L_pH
  std::optional<double> C_sh_fF;
  double left_fraction = 0.5;
  // transmon_inductor
  double C_fF = 0.0;
  std::vector<double> C_J_fF;
  double E_J = 0.0;
  MultimodeOptions options;
};

struct DispersiveConfig {
  std::vector<double> flux;
  std::optional<double> omega_r;
  std::optional<double> g_c;
  DispersiveOptions options;
};

struct RunConfig {
  std::optional<DeviceConfig> device;
  std::optional<ChargeBasisSpec> basis;
  std::optional<SpectrumConfig> spectrum;
  std::optional<SynthOptions> synth;
  std::optional<FitConfig> fit;
  std::optional<OdrConfig> odr;
  std::optional<DiodeConfig> diode;
  std::optional<MultimodeConfig> multimode;
  std::optional<DispersiveConfig> dispersive;
  std::uint64_t seed = 1;
  std::optional<int> threads;
  std::optional<std::string> out;
  json echo;  // validated input with imports inlined
};

// Parses and validates every block present; relative paths resolve against `base_dir`.
RunConfig parse_config(const json& document, const std::filesystem::path& base_dir);
RunConfig load_config(const std::string& path);

}  // namespace squidharm::cli
