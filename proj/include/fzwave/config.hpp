#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fzwave/evolution.hpp"
#include "fzwave/forcing.hpp"
#include "fzwave/material.hpp"
#include "fzwave/spatial.hpp"

namespace fzwave {

using json = nlohmann::json;

[[noreturn]] inline void config_error(const std::string& path,
                                      const std::string& what) {
  throw std::invalid_argument("config error at " + path + ": " + what);
}

namespace cfg_detail {

// Unknown keys are hard errors so a typo can never silently disable a check.
inline void require_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) config_error(path + "." + it.key(), "unknown key");
  }
}

inline const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) config_error(path, "expected a number");
  return v.get<double>();
}

inline double get_number(const json& obj, const std::string& path,
                         const char* key, double fallback) {
  const json* v = find(obj, key);
  return v ? number_at(*v, path + "." + key) : fallback;
}

inline double get_required_number(const json& obj, const std::string& path,
                                  const char* key) {
  const json* v = find(obj, key);
  if (!v) config_error(path + "." + key, "missing required key");
  return number_at(*v, path + "." + key);
}

inline int get_int(const json& obj, const std::string& path, const char* key,
                   int fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer())
    config_error(path + "." + key, "expected an integer");
  return v->get<int>();
}

inline int get_required_int(const json& obj, const std::string& path,
                            const char* key) {
  const json* v = find(obj, key);
  if (!v) config_error(path + "." + key, "missing required key");
  if (!v->is_number_integer())
    config_error(path + "." + key, "expected an integer");
  return v->get<int>();
}

inline std::string get_string(const json& obj, const std::string& path,
                              const char* key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) config_error(path + "." + key, "expected a string");
  return v->get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& path, const char* key,
                     bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) config_error(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

inline std::vector<double> get_number_list(const json& v,
                                           const std::string& path) {
  if (!v.is_array()) config_error(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_at(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace cfg_detail

// Nodal-field recipe; "mode" needs the eigenbasis, so realization happens
// after the eigensolve.
struct FieldSpec {
  std::string preset = "zero";  // zero | sine | bump | mode
  double amplitude = 1.0;
  int index = 1;         // sine wavenumber or eigenmode number (1-based)
  double center = 0.5;   // bump location
  double width = 0.1;    // bump width
  std::string path;      // config path, for error messages
};

struct StressSpec {
  std::string preset = "zero";  // zero | constant | table
  double value = 0.0;
  std::vector<double> values;
  std::string path;
};

struct LoadConfig {
  std::string preset = "zero";  // zero | constant | gaussian-pulse | mode
  double amplitude = 1.0;
  double t0 = 0.0;
  double sigma = 0.1;
  int index = 1;  // eigenmode number for the "mode" preset
  // spatial profile for constant / gaussian-pulse
  std::string profile = "uniform";  // uniform | bump | sine
  double profile_center = 0.5;
  double profile_width = 0.1;
  int profile_index = 1;  // sine wavenumber
  std::string path;
};

struct RunConfig {
  MaterialModel model;
  FieldSpec g_spec, h_spec;
  StressSpec s_spec;
  bool hookean_stress = false;
  LoadConfig load;
  SchemeConfig scheme;
  std::string out_dir = "out";
  std::vector<double> snapshot_times;
  long seed = 0;
  json echo;  // normalized configuration, a reparse fixed point
};

namespace cfg_detail {

inline MaterialModel parse_model(const json& m) {
  using namespace cfg_detail;
  require_keys(m, "model",
               {"length", "n_elements", "alpha", "tau", "coefficients"});
  MaterialModel model;
  model.domain_length = get_number(m, "model", "length", 1.0);
  model.n_elements = get_required_int(m, "model", "n_elements");
  model.alpha = get_required_number(m, "model", "alpha");
  model.tau = get_required_number(m, "model", "tau");
  if (model.n_elements < 2)
    config_error("model.n_elements", "mesh needs at least two elements");

  const json* c = find(m, "coefficients");
  if (!c) config_error("model.coefficients", "missing required key");
  const std::string path = "model.coefficients";
  const std::string preset = get_string(*c, path, "preset", "constant");
  const int n = model.n_elements;
  const double h = model.domain_length / n;
  model.rho.resize(n);
  model.mu.resize(n);
  model.lambda.resize(n);
  if (preset == "constant") {
    require_keys(*c, path, {"preset", "rho", "mu", "lambda"});
    const double rho = get_number(*c, path, "rho", 1.0);
    const double mu = get_number(*c, path, "mu", 1.0);
    const double lambda = get_number(*c, path, "lambda", 0.0);
    for (int e = 0; e < n; ++e) {
      model.rho[e] = rho;
      model.mu[e] = mu;
      model.lambda[e] = lambda;
    }
  } else if (preset == "two-layer") {
    require_keys(*c, path,
                 {"preset", "rho_left", "mu_left", "lambda_left", "rho_right",
                  "mu_right", "lambda_right", "interface"});
    const double il = get_number(*c, path, "interface", 0.5);
    if (!(il > 0.0 && il < 1.0))
      config_error(path + ".interface",
                   "interface must lie strictly inside (0, 1)");
    const double rl = get_number(*c, path, "rho_left", 1.0);
    const double ml = get_number(*c, path, "mu_left", 1.0);
    const double ll = get_number(*c, path, "lambda_left", 0.0);
    const double rr = get_number(*c, path, "rho_right", 1.0);
    const double mr = get_number(*c, path, "mu_right", 1.0);
    const double lr = get_number(*c, path, "lambda_right", 0.0);
    for (int e = 0; e < n; ++e) {
      const bool left = (e + 0.5) * h < il * model.domain_length;
      model.rho[e] = left ? rl : rr;
      model.mu[e] = left ? ml : mr;
      model.lambda[e] = left ? ll : lr;
    }
  } else if (preset == "ramp") {
    require_keys(*c, path,
                 {"preset", "rho_start", "rho_end", "mu_start", "mu_end",
                  "lambda_start", "lambda_end"});
    const double r0 = get_number(*c, path, "rho_start", 1.0);
    const double r1 = get_number(*c, path, "rho_end", 1.0);
    const double m0 = get_number(*c, path, "mu_start", 1.0);
    const double m1 = get_number(*c, path, "mu_end", 1.0);
    const double l0 = get_number(*c, path, "lambda_start", 0.0);
    const double l1 = get_number(*c, path, "lambda_end", 0.0);
    for (int e = 0; e < n; ++e) {
      const double x = (e + 0.5) / n;  // relative midpoint
      model.rho[e] = r0 + (r1 - r0) * x;
      model.mu[e] = m0 + (m1 - m0) * x;
      model.lambda[e] = l0 + (l1 - l0) * x;
    }
  } else if (preset == "table") {
    require_keys(*c, path, {"preset", "rho", "mu", "lambda"});
    for (const char* key : {"rho", "mu", "lambda"}) {
      const json* v = find(*c, key);
      if (!v) config_error(path + "." + key, "missing required key");
      auto vals = get_number_list(*v, path + "." + key);
      if (static_cast<int>(vals.size()) != n)
        config_error(path + "." + key,
                     "expected one value per element (" + std::to_string(n) +
                         ")");
      (key == std::string("rho")
           ? model.rho
           : key == std::string("mu") ? model.mu : model.lambda) =
          std::move(vals);
    }
  } else {
    config_error(path + ".preset",
                 "unknown preset \"" + preset +
                     "\" (expected constant, two-layer, ramp, or table)");
  }

  try {
    validate_material(model);
  } catch (const std::invalid_argument& err) {
    config_error("model", err.what());
  }
  return model;
}

inline FieldSpec parse_field(const json* v, const std::string& path) {
  FieldSpec fs;
  fs.path = path;
  if (!v) return fs;  // absent means zero
  const std::string preset = get_string(*v, path, "preset", "zero");
  fs.preset = preset;
  if (preset == "zero") {
    require_keys(*v, path, {"preset"});
  } else if (preset == "sine") {
    require_keys(*v, path, {"preset", "amplitude", "index"});
    fs.amplitude = get_number(*v, path, "amplitude", 1.0);
    fs.index = get_int(*v, path, "index", 1);
    if (fs.index < 1) config_error(path + ".index", "index must be >= 1");
  } else if (preset == "bump") {
    require_keys(*v, path, {"preset", "amplitude", "center", "width"});
    fs.amplitude = get_number(*v, path, "amplitude", 1.0);
    fs.center = get_number(*v, path, "center", 0.5);
    fs.width = get_number(*v, path, "width", 0.1);
    if (!(fs.width > 0.0)) config_error(path + ".width", "width must be positive");
  } else if (preset == "mode") {
    require_keys(*v, path, {"preset", "amplitude", "index"});
    fs.amplitude = get_number(*v, path, "amplitude", 1.0);
    fs.index = get_int(*v, path, "index", 1);
    if (fs.index < 1) config_error(path + ".index", "index must be >= 1");
  } else {
    config_error(path + ".preset",
                 "unknown preset \"" + preset +
                     "\" (expected zero, sine, bump, or mode)");
  }
  return fs;
}

inline StressSpec parse_stress(const json* v, const std::string& path, int n) {
  StressSpec ss;
  ss.path = path;
  if (!v) return ss;
  const std::string preset = get_string(*v, path, "preset", "zero");
  ss.preset = preset;
  if (preset == "zero") {
    require_keys(*v, path, {"preset"});
  } else if (preset == "constant") {
    require_keys(*v, path, {"preset", "value"});
    ss.value = get_number(*v, path, "value", 0.0);
  } else if (preset == "table") {
    require_keys(*v, path, {"preset", "values"});
    const json* vals = find(*v, "values");
    if (!vals) config_error(path + ".values", "missing required key");
    ss.values = get_number_list(*vals, path + ".values");
    if (static_cast<int>(ss.values.size()) != n)
      config_error(path + ".values", "expected one value per element (" +
                                         std::to_string(n) + ")");
  } else {
    config_error(path + ".preset",
                 "unknown preset \"" + preset +
                     "\" (expected zero, constant, or table)");
  }
  return ss;
}

inline LoadConfig parse_load(const json* v) {
  LoadConfig lc;
  lc.path = "load";
  if (!v) return lc;
  const std::string path = "load";
  lc.preset = get_string(*v, path, "preset", "zero");
  auto parse_profile = [&](const json& obj) {
    const json* p = find(obj, "profile");
    if (!p) return;  // uniform by default
    const std::string ppath = path + ".profile";
    lc.profile = get_string(*p, ppath, "preset", "uniform");
    if (lc.profile == "uniform") {
      require_keys(*p, ppath, {"preset"});
    } else if (lc.profile == "bump") {
      require_keys(*p, ppath, {"preset", "center", "width"});
      lc.profile_center = get_number(*p, ppath, "center", 0.5);
      lc.profile_width = get_number(*p, ppath, "width", 0.1);
      if (!(lc.profile_width > 0.0))
        config_error(ppath + ".width", "width must be positive");
    } else if (lc.profile == "sine") {
      require_keys(*p, ppath, {"preset", "index"});
      lc.profile_index = get_int(*p, ppath, "index", 1);
      if (lc.profile_index < 1)
        config_error(ppath + ".index", "index must be >= 1");
    } else {
      config_error(ppath + ".preset",
                   "unknown preset \"" + lc.profile +
                       "\" (expected uniform, bump, or sine)");
    }
  };
  if (lc.preset == "zero") {
    require_keys(*v, path, {"preset"});
  } else if (lc.preset == "constant") {
    require_keys(*v, path, {"preset", "amplitude", "profile"});
    lc.amplitude = get_number(*v, path, "amplitude", 1.0);
    parse_profile(*v);
  } else if (lc.preset == "gaussian-pulse") {
    require_keys(*v, path, {"preset", "amplitude", "t0", "sigma", "profile"});
    lc.amplitude = get_number(*v, path, "amplitude", 1.0);
    lc.t0 = get_number(*v, path, "t0", 0.0);
    lc.sigma = get_number(*v, path, "sigma", 0.1);
    if (!(lc.sigma > 0.0)) config_error(path + ".sigma", "sigma must be positive");
    parse_profile(*v);
  } else if (lc.preset == "mode") {
    require_keys(*v, path, {"preset", "amplitude", "index"});
    lc.amplitude = get_number(*v, path, "amplitude", 1.0);
    lc.index = get_int(*v, path, "index", 1);
    if (lc.index < 1) config_error(path + ".index", "index must be >= 1");
  } else {
    config_error(path + ".preset",
                 "unknown preset \"" + lc.preset +
                     "\" (expected zero, constant, gaussian-pulse, or mode)");
  }
  return lc;
}

inline json echo_field(const FieldSpec& fs) {
  json v;
  v["preset"] = fs.preset;
  if (fs.preset == "sine" || fs.preset == "mode") {
    v["amplitude"] = fs.amplitude;
    v["index"] = fs.index;
  } else if (fs.preset == "bump") {
    v["amplitude"] = fs.amplitude;
    v["center"] = fs.center;
    v["width"] = fs.width;
  }
  return v;
}

}  // namespace cfg_detail

inline RunConfig parse_run_config(const json& root) {
  using namespace cfg_detail;
  require_keys(root, "<root>", {"model", "data", "load", "scheme", "output"});
  RunConfig rc;

  const json* m = find(root, "model");
  if (!m) config_error("model", "missing required block");
  rc.model = parse_model(*m);

  if (const json* d = find(root, "data")) {
    require_keys(*d, "data", {"g", "h", "s", "hookean_stress"});
    rc.g_spec = parse_field(find(*d, "g"), "data.g");
    rc.h_spec = parse_field(find(*d, "h"), "data.h");
    rc.hookean_stress = get_bool(*d, "data", "hookean_stress", false);
    const json* s = find(*d, "s");
    if (rc.hookean_stress && s)
      config_error("data.s",
                   "unused when hookean_stress is true; remove one of them");
    rc.s_spec = parse_stress(s, "data.s", rc.model.n_elements);
  } else {
    rc.g_spec.path = "data.g";
    rc.h_spec.path = "data.h";
    rc.s_spec.path = "data.s";
  }

  rc.load = parse_load(find(root, "load"));

  const json* sc = find(root, "scheme");
  if (!sc) config_error("scheme", "missing required block");
  require_keys(*sc, "scheme", {"dt", "t_final", "scheme", "n_modes"});
  rc.scheme.dt = get_required_number(*sc, "scheme", "dt");
  rc.scheme.t_final = get_required_number(*sc, "scheme", "t_final");
  rc.scheme.n_modes = get_required_int(*sc, "scheme", "n_modes");
  const std::string sname = get_string(*sc, "scheme", "scheme", "trapezoid");
  if (sname == "trapezoid")
    rc.scheme.scheme = TimeScheme::trapezoid;
  else if (sname == "implicit-euler")
    rc.scheme.scheme = TimeScheme::implicit_euler;
  else
    config_error("scheme.scheme",
                 "unknown scheme \"" + sname +
                     "\" (expected trapezoid or implicit-euler)");
  try {
    validate_scheme(rc.scheme);
  } catch (const std::invalid_argument& err) {
    config_error("scheme", err.what());
  }
  if (rc.scheme.n_modes > rc.model.n_elements - 1)
    config_error("scheme.n_modes",
                 "at most n_elements - 1 modes exist on this mesh");

  if (const json* o = find(root, "output")) {
    require_keys(*o, "output", {"directory", "snapshot_times", "seed"});
    rc.out_dir = get_string(*o, "output", "directory", "out");
    if (const json* st = find(*o, "snapshot_times"))
      rc.snapshot_times = get_number_list(*st, "output.snapshot_times");
    else
      rc.snapshot_times = {0.0, rc.scheme.t_final};
    const json* sd = find(*o, "seed");
    if (sd) {
      if (!sd->is_number_integer())
        config_error("output.seed", "expected an integer");
      rc.seed = sd->get<long>();
    }
  } else {
    rc.snapshot_times = {0.0, rc.scheme.t_final};
  }

  // Normalized echo: defaults filled in, key set identical to what the
  // parser accepts, so reparsing it reproduces this configuration.
  json echo;
  echo["model"]["length"] = rc.model.domain_length;
  echo["model"]["n_elements"] = rc.model.n_elements;
  echo["model"]["alpha"] = rc.model.alpha;
  echo["model"]["tau"] = rc.model.tau;
  {
    json c;
    c["preset"] = "table";
    c["rho"] = rc.model.rho;
    c["mu"] = rc.model.mu;
    c["lambda"] = rc.model.lambda;
    echo["model"]["coefficients"] = c;
  }
  echo["data"]["g"] = cfg_detail::echo_field(rc.g_spec);
  echo["data"]["h"] = cfg_detail::echo_field(rc.h_spec);
  echo["data"]["hookean_stress"] = rc.hookean_stress;
  if (!rc.hookean_stress) {
    json s;
    s["preset"] = rc.s_spec.preset;
    if (rc.s_spec.preset == "constant") s["value"] = rc.s_spec.value;
    if (rc.s_spec.preset == "table") s["values"] = rc.s_spec.values;
    echo["data"]["s"] = s;
  }
  {
    json l;
    l["preset"] = rc.load.preset;
    if (rc.load.preset == "constant" || rc.load.preset == "gaussian-pulse") {
      l["amplitude"] = rc.load.amplitude;
      if (rc.load.preset == "gaussian-pulse") {
        l["t0"] = rc.load.t0;
        l["sigma"] = rc.load.sigma;
      }
      json p;
      p["preset"] = rc.load.profile;
      if (rc.load.profile == "bump") {
        p["center"] = rc.load.profile_center;
        p["width"] = rc.load.profile_width;
      } else if (rc.load.profile == "sine") {
        p["index"] = rc.load.profile_index;
      }
      l["profile"] = p;
    } else if (rc.load.preset == "mode") {
      l["amplitude"] = rc.load.amplitude;
      l["index"] = rc.load.index;
    }
    echo["load"] = l;
  }
  echo["scheme"]["dt"] = rc.scheme.dt;
  echo["scheme"]["t_final"] = rc.scheme.t_final;
  echo["scheme"]["scheme"] = sname;
  echo["scheme"]["n_modes"] = rc.scheme.n_modes;
  echo["output"]["directory"] = rc.out_dir;
  echo["output"]["snapshot_times"] = rc.snapshot_times;
  echo["output"]["seed"] = rc.seed;
  rc.echo = std::move(echo);
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("config parse failure in " + path + ": " +
                                err.what());
  }
  return parse_run_config(root);
}

// Field realization; runs after the eigensolve so "mode" presets can refer
// to discrete eigenvectors.
inline NodalField realize_field(const FieldSpec& fs, const MaterialModel& m,
                                const ModalBasis& basis) {
  const int n = m.n_elements;
  const double L = m.domain_length;
  NodalField f(n - 1, 0.0);
  if (fs.preset == "zero") return f;
  if (fs.preset == "sine") {
    for (int i = 0; i < n - 1; ++i) {
      const double x = (i + 1) * m.h();
      f[i] = fs.amplitude * std::sin(fs.index * 3.14159265358979324 * x / L);
    }
  } else if (fs.preset == "bump") {
    for (int i = 0; i < n - 1; ++i) {
      const double x = (i + 1) * m.h();
      const double d = (x - fs.center) / fs.width;
      f[i] = fs.amplitude * std::exp(-d * d);
    }
  } else {  // mode
    if (fs.index > basis.n_modes())
      config_error(fs.path + ".index",
                   "only " + std::to_string(basis.n_modes()) +
                       " modes are available");
    for (int i = 0; i < n - 1; ++i)
      f[i] = fs.amplitude * basis.modes[fs.index - 1][i];
  }
  return f;
}

inline std::vector<double> realize_stress(const StressSpec& ss, int n) {
  if (ss.preset == "zero") return std::vector<double>(n, 0.0);
  if (ss.preset == "constant") return std::vector<double>(n, ss.value);
  return ss.values;
}

inline InitialData realize_data(const RunConfig& rc, const ModalBasis& basis) {
  InitialData data;
  data.g = realize_field(rc.g_spec, rc.model, basis);
  data.h = realize_field(rc.h_spec, rc.model, basis);
  data.hookean_stress = rc.hookean_stress;
  if (!rc.hookean_stress)
    data.s = realize_stress(rc.s_spec, rc.model.n_elements);
  return data;
}

inline LoadSpec realize_load(const LoadConfig& lc, const MaterialModel& m,
                             const ModalBasis& basis) {
  LoadSpec load;
  if (lc.preset == "zero") return load;
  const double L = m.domain_length;
  if (lc.preset == "constant") {
    const double amp = lc.amplitude;
    load.time_factor = [amp](double) { return amp; };
  } else if (lc.preset == "gaussian-pulse") {
    const double amp = lc.amplitude, t0 = lc.t0, sg = lc.sigma;
    load.time_factor = [amp, t0, sg](double t) {
      const double d = (t - t0) / sg;
      return amp * std::exp(-0.5 * d * d);
    };
  } else {  // mode: constant drive along one eigenmode shape
    if (lc.index > basis.n_modes())
      config_error(lc.path + ".index",
                   "only " + std::to_string(basis.n_modes()) +
                       " modes are available");
    const double amp = lc.amplitude;
    load.time_factor = [amp](double) { return amp; };
    const NodalField shape = basis.modes[lc.index - 1];
    const double h = m.h();
    const int n = m.n_elements;
    load.profile = [shape, h, n](double x) {
      // piecewise-linear interpolation of the eigenvector, zero at the ends
      const double r = x / h;
      const int e = std::max(0, std::min(n - 1, static_cast<int>(r)));
      const double left = e == 0 ? 0.0 : shape[e - 1];
      const double right = e == n - 1 ? 0.0 : shape[e];
      return left + (right - left) * (r - e);
    };
    return load;
  }
  if (lc.profile == "uniform") {
    load.profile = [](double) { return 1.0; };
  } else if (lc.profile == "bump") {
    const double c = lc.profile_center, w = lc.profile_width;
    load.profile = [c, w](double x) {
      const double d = (x - c) / w;
      return std::exp(-d * d);
    };
  } else {  // sine
    const int k = lc.profile_index;
    load.profile = [k, L](double x) {
      return std::sin(k * 3.14159265358979324 * x / L);
    };
  }
  return load;
}

}  // namespace fzwave
