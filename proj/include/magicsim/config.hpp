#ifndef MAGICSIM_CONFIG_HPP_
#define MAGICSIM_CONFIG_HPP_

// Run configuration: a sectioned key = value text file layered over the
// built-in defaults, which reproduce the reference three-ion apparatus
// (trap and field values, calibrated noise and detection models).
// Frequencies require an explicit unit tag, "2pi*Hz" or "rad/s".

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "magicsim/constants.hpp"
#include "magicsim/detection.hpp"
#include "magicsim/errors.hpp"
#include "magicsim/field_map.hpp"
#include "magicsim/ion_crystal.hpp"
#include "magicsim/noise.hpp"
#include "magicsim/sequence.hpp"

namespace magicsim {

struct RunConfig {
  struct Species {
    std::string preset = "yb171";  // or "custom"
    double mass = constants::yb171_mass;
    double g_factor = constants::yb171_g_factor;
    double hyperfine = constants::yb171_hyperfine;  // rad/s
  } species;

  struct Trap {
    double nu_axial = hz_2pi(123.5e3);   // rad/s
    double nu_radial = hz_2pi(502e3);    // rad/s
    int n_ions = 3;
  } trap;

  struct Field {
    double b_parallel = 3.4e-4;  // T
    double b_perp = 6.2e-5;      // T
    double grad_pm = 19.0;       // T/m
  } field;

  struct Noise {
    std::string kind = "ornstein_uhlenbeck";  // or "none"
    // Calibrated so the plain-Ramsey 1/e coherence time is 200 us for the
    // default correlation time.
    double sigma = 7164.5;  // rad/s
    double tau_c = 5e-3;    // s
    double dt = 5e-6;       // s
  } noise;

  struct Crosstalk {
    bool enabled = false;
  } crosstalk;

  struct Detection {
    bool enabled = true;
    std::array<double, 3> rates = {0.985, 0.889, 0.852};
  } detection;

  struct Experiment {
    int pair_first = 1;  // 1-based ion labels, as in the result tables
    int pair_second = 3;
    double tau = 0;  // s; 0 = auto from the J matrix per command
    int phi_points = 16;
    int echo_pulses = 48;
    std::string echo_pattern = "xy4";
    std::vector<double> echo_phase_list;  // used when echo_pattern = "list"
    int repeats = 50;
    int trajectories = 400;
    double rabi = hz_2pi(60e3);   // rad/s
    double pulse_length = 8e-6;   // s, spectrum probe
    int spectrum_points = 1501;
    double scan_nu_min = hz_2pi(60e3);
    double scan_nu_max = hz_2pi(400e3);
    int scan_points = 25;
  } experiment;

  std::uint64_t seed = 20111;
  std::string out_dir = "out";

  // --- derived objects -------------------------------------------------

  IonSpecies make_species() const {
    return {species.mass, species.g_factor, species.hyperfine};
  }
  TrapConfig make_trap() const {
    return {trap.nu_axial, trap.nu_radial, trap.n_ions};
  }
  FieldParams make_field() const {
    return {field.b_parallel, field.b_perp, field.grad_pm};
  }
  NoiseModel make_noise() const {
    NoiseModel m;
    if (noise.kind == "ornstein_uhlenbeck")
      m.kind = NoiseModel::Kind::ornstein_uhlenbeck;
    else if (noise.kind != "none")
      throw ValidationError("noise.kind", "must be none|ornstein_uhlenbeck");
    m.sigma = noise.sigma;
    m.tau_c = noise.tau_c;
    m.dt = noise.dt;
    return m;
  }
  std::optional<DetectionModel> make_detection() const {
    if (!detection.enabled) return std::nullopt;
    return calibrate_detection(detection.rates);
  }
  EchoConfig make_echo() const {
    EchoConfig echo;
    echo.n_pulses = experiment.echo_pulses;
    echo.phases = experiment.echo_pattern == "list"
                      ? experiment.echo_phase_list
                      : echo_pattern(experiment.echo_pattern);
    echo.rabi = experiment.rabi;
    return echo;
  }
  // 0-based experiment pair
  std::pair<int, int> make_pair() const {
    return {experiment.pair_first - 1, experiment.pair_second - 1};
  }

  void strip_stochastics() {  // --ideal
    noise.kind = "none";
    detection.enabled = false;
    crosstalk.enabled = false;
  }

  void validate() const {
    if (species.preset != "yb171" && species.preset != "custom")
      throw ValidationError("species.preset", "must be yb171|custom");
    if (!(species.mass > 0))
      throw ValidationError("species.mass", "must be > 0");
    make_trap().validate();
    make_field().validate();
    make_noise().validate();
    for (double r : detection.rates)
      if (!(r > 0 && r < 1))
        throw ValidationError("detection.rates", "must be in (0, 1)");
    const auto [a, b] = make_pair();
    if (a < 0 || a >= trap.n_ions || b < 0 || b >= trap.n_ions || a == b)
      throw ValidationError("experiment.pair",
                            "needs two distinct 1-based ion labels <= n_ions");
    if (experiment.tau < 0)
      throw ValidationError("experiment.tau_s", "must be >= 0");
    if (experiment.phi_points < 4)
      throw ValidationError("experiment.phi_points", "must be >= 4");
    if (experiment.echo_pulses < 0)
      throw ValidationError("experiment.echo_pulses", "must be >= 0");
    if (experiment.repeats < 0)
      throw ValidationError("experiment.repeats", "must be >= 0");
    if (experiment.trajectories < 1)
      throw ValidationError("experiment.trajectories", "must be >= 1");
    if (!(experiment.rabi > 0))
      throw ValidationError("experiment.rabi", "must be > 0");
    if (!(experiment.pulse_length > 0))
      throw ValidationError("experiment.pulse_length_s", "must be > 0");
    if (experiment.spectrum_points < 3)
      throw ValidationError("experiment.spectrum_points", "must be >= 3");
    if (!(experiment.scan_nu_min > 0) ||
        experiment.scan_nu_max < experiment.scan_nu_min)
      throw ValidationError("experiment.scan_nu_min",
                            "need 0 < scan_nu_min <= scan_nu_max");
    if (experiment.scan_points < 1)
      throw ValidationError("experiment.scan_points", "must be >= 1");
    make_echo().validate();
  }

  nlohmann::ordered_json resolved_json() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_number(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (detail::trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(field, "not a number: '" + text + "'");
}

// "123.5e3 2pi*Hz" or "7164.5 rad/s" -> rad/s
inline double parse_frequency(const std::string& field,
                              const std::string& text) {
  std::istringstream in(text);
  double value = 0;
  std::string unit;
  if (!(in >> value >> unit))
    throw ValidationError(field, "expected '<number> 2pi*Hz' or '<number> rad/s'");
  std::string rest;
  if (in >> rest) throw ValidationError(field, "trailing content: " + rest);
  if (unit == "2pi*Hz") return hz_2pi(value);
  if (unit == "rad/s") return value;
  throw ValidationError(field, "unknown frequency unit: " + unit);
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config", "bad section header: " + line);
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config",
                            "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key =
        (section.empty() ? "" : section + ".") + detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    auto num = [&] { return detail::parse_number(key, value); };
    auto freq = [&] { return detail::parse_frequency(key, value); };

    if (key == "include") {
      if (value != "paper_defaults")
        throw ValidationError("include", "unknown preset: " + value);
      cfg = RunConfig{};  // reset to the built-in defaults
    } else if (key == "species.preset") {
      cfg.species.preset = value;
      if (value == "yb171") {
        cfg.species.mass = constants::yb171_mass;
        cfg.species.g_factor = constants::yb171_g_factor;
        cfg.species.hyperfine = constants::yb171_hyperfine;
      } else if (value != "custom") {
        throw ValidationError("species.preset", "must be yb171|custom");
      }
    } else if (key == "species.mass_kg") {
      cfg.species.mass = num();
      cfg.species.preset = "custom";
    } else if (key == "species.g_factor") {
      cfg.species.g_factor = num();
      cfg.species.preset = "custom";
    } else if (key == "species.hyperfine") {
      cfg.species.hyperfine = freq();
      cfg.species.preset = "custom";
    } else if (key == "trap.nu_axial") {
      cfg.trap.nu_axial = freq();
    } else if (key == "trap.nu_radial") {
      cfg.trap.nu_radial = freq();
    } else if (key == "trap.n_ions") {
      cfg.trap.n_ions = static_cast<int>(num());
    } else if (key == "field.b_parallel_t") {
      cfg.field.b_parallel = num();
    } else if (key == "field.b_perp_t") {
      cfg.field.b_perp = num();
    } else if (key == "field.grad_pm_t_per_m") {
      cfg.field.grad_pm = num();
    } else if (key == "noise.kind") {
      cfg.noise.kind = value;
    } else if (key == "noise.sigma") {
      cfg.noise.sigma = freq();
    } else if (key == "noise.tau_c_s") {
      cfg.noise.tau_c = num();
    } else if (key == "noise.dt_s") {
      cfg.noise.dt = num();
    } else if (key == "crosstalk.enabled") {
      cfg.crosstalk.enabled = value == "true" || value == "1";
    } else if (key == "detection.enabled") {
      cfg.detection.enabled = value == "true" || value == "1";
    } else if (key == "detection.rate_dark") {
      cfg.detection.rates[0] = num();
    } else if (key == "detection.rate_one") {
      cfg.detection.rates[1] = num();
    } else if (key == "detection.rate_two") {
      cfg.detection.rates[2] = num();
    } else if (key == "experiment.pair") {
      std::istringstream pair(value);
      if (!(pair >> cfg.experiment.pair_first >> cfg.experiment.pair_second))
        throw ValidationError("experiment.pair", "expected two ion labels");
    } else if (key == "experiment.tau_s") {
      cfg.experiment.tau = num();
    } else if (key == "experiment.phi_points") {
      cfg.experiment.phi_points = static_cast<int>(num());
    } else if (key == "experiment.echo_pulses") {
      cfg.experiment.echo_pulses = static_cast<int>(num());
    } else if (key == "experiment.echo_pattern") {
      if (value.rfind("list:", 0) == 0) {
        cfg.experiment.echo_pattern = "list";
        cfg.experiment.echo_phase_list.clear();
        std::istringstream phases(value.substr(5));
        std::string tok;
        while (std::getline(phases, tok, ','))
          cfg.experiment.echo_phase_list.push_back(
              detail::parse_number(key, tok));
        if (cfg.experiment.echo_phase_list.empty())
          throw ValidationError(key, "empty phase list");
      } else {
        cfg.experiment.echo_pattern = value;
        echo_pattern(value);  // validates the name
      }
    } else if (key == "experiment.repeats") {
      cfg.experiment.repeats = static_cast<int>(num());
    } else if (key == "experiment.trajectories") {
      cfg.experiment.trajectories = static_cast<int>(num());
    } else if (key == "experiment.rabi") {
      cfg.experiment.rabi = freq();
    } else if (key == "experiment.pulse_length_s") {
      cfg.experiment.pulse_length = num();
    } else if (key == "experiment.spectrum_points") {
      cfg.experiment.spectrum_points = static_cast<int>(num());
    } else if (key == "experiment.scan_nu_min") {
      cfg.experiment.scan_nu_min = freq();
    } else if (key == "experiment.scan_nu_max") {
      cfg.experiment.scan_nu_max = freq();
    } else if (key == "experiment.scan_points") {
      cfg.experiment.scan_points = static_cast<int>(num());
    } else if (key == "run.seed") {
      cfg.seed = static_cast<std::uint64_t>(num());
    } else if (key == "run.out_dir") {
      cfg.out_dir = value;
    } else {
      throw ValidationError(key, "unknown configuration key");
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

inline nlohmann::ordered_json RunConfig::resolved_json() const {
  nlohmann::ordered_json j;
  j["species"] = {{"preset", species.preset},
                  {"mass_kg", species.mass},
                  {"g_factor", species.g_factor},
                  {"hyperfine_rad_per_s", species.hyperfine}};
  j["trap"] = {{"nu_axial_rad_per_s", trap.nu_axial},
               {"nu_radial_rad_per_s", trap.nu_radial},
               {"n_ions", trap.n_ions}};
  j["field"] = {{"b_parallel_t", field.b_parallel},
                {"b_perp_t", field.b_perp},
                {"grad_pm_t_per_m", field.grad_pm}};
  j["noise"] = {{"kind", noise.kind},
                {"sigma_rad_per_s", noise.sigma},
                {"tau_c_s", noise.tau_c},
                {"dt_s", noise.dt}};
  j["crosstalk"] = {{"enabled", crosstalk.enabled}};
  j["detection"] = {{"enabled", detection.enabled},
                    {"rates", detection.rates}};
  j["experiment"] = {{"pair", {experiment.pair_first, experiment.pair_second}},
                     {"tau_s", experiment.tau},
                     {"phi_points", experiment.phi_points},
                     {"echo_pulses", experiment.echo_pulses},
                     {"echo_pattern", experiment.echo_pattern},
                     {"echo_phase_list", experiment.echo_phase_list},
                     {"repeats", experiment.repeats},
                     {"trajectories", experiment.trajectories},
                     {"rabi_rad_per_s", experiment.rabi},
                     {"pulse_length_s", experiment.pulse_length},
                     {"spectrum_points", experiment.spectrum_points},
                     {"scan_nu_min_rad_per_s", experiment.scan_nu_min},
                     {"scan_nu_max_rad_per_s", experiment.scan_nu_max},
                     {"scan_points", experiment.scan_points}};
  j["run"] = {{"seed", seed}, {"out_dir", out_dir}};
  return j;
}

}  // namespace magicsim

#endif  // MAGICSIM_CONFIG_HPP_
