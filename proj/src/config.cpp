#include "permlaw/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace permlaw::config {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 11> kKinds = {
    "esd",           "locallaw",  "loopres", "ssv",  "traces",   "noholes",
    "concentration", "smallball", "pmpm",    "girko", "flatcheck"};

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') {
    ++begin;  // from_chars rejects an explicit plus
    if (begin == end || *begin == '+' || *begin == '-') return false;  // no double sign
  }
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

bool known_kind(const std::string& kind) {
  for (const char* k : kKinds)
    if (kind == k) return true;
  return false;
}

Complex parse_complex(const std::string& text) {
  const auto fail = [&]() -> Complex {
    throw std::invalid_argument("malformed complex literal: '" + text + "'");
  };
  if (text.empty()) fail();
  // Pure imaginary: trailing 'i' with no second sign after position 0.
  // General: a+bi / a-bi, split at the last sign that is not an exponent sign
  // and not the leading sign.
  if (text.back() == 'i') {
    const std::string body = text.substr(0, text.size() - 1);
    // Find the split sign (skip index 0 and signs directly after e/E).
    std::size_t split = std::string::npos;
    for (std::size_t p = body.size(); p-- > 1;) {
      if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
        split = p;
        break;
      }
    }
    double re = 0.0, im = 0.0;
    if (split == std::string::npos) {
      // "bi" with b possibly signed; allow bare "i", "+i", "-i".
      std::string b = body;
      if (b.empty() || b == "+")
        im = 1.0;
      else if (b == "-")
        im = -1.0;
      else if (!parse_double(b, im))
        fail();
      return Complex(0.0, im);
    }
    if (!parse_double(body.substr(0, split), re)) fail();
    std::string b = body.substr(split);
    if (b == "+")
      im = 1.0;
    else if (b == "-")
      im = -1.0;
    else if (!parse_double(b, im))
      fail();
    return Complex(re, im);
  }
  double re = 0.0;
  if (!parse_double(text, re)) fail();
  return Complex(re, 0.0);
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(17);
  if (z.imag() == 0.0) {
    os << z.real();
    return os.str();
  }
  os << z.real() << (z.imag() < 0 ? "-" : "+");
  std::ostringstream im;
  im.precision(17);
  im << std::abs(z.imag());
  return os.str() + im.str() + "i";
}

std::string Validation::joined() const {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += "; ";
    out += e;
  }
  return out;
}

namespace {

// Tracks which keys were consumed so unknown keys can be reported.
struct Reader {
  const json& obj;
  std::vector<std::string> errors;
  std::vector<std::string> seen;

  bool has(const std::string& key) {
    if (obj.contains(key)) {
      seen.push_back(key);
      return true;
    }
    return false;
  }

  template <class T>
  void number(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        errors.push_back(key + ": expected a number");
        return;
      }
      out = v.get<double>();
    } else {
      if (!v.is_number_integer() && !v.is_number_unsigned()) {
        errors.push_back(key + ": expected an integer");
        return;
      }
      if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        errors.push_back(key + ": must be nonnegative");
        return;
      }
      out = v.get<T>();
    }
  }

  void signed_int(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      errors.push_back(key + ": expected an integer");
      return;
    }
    out = v.get<int>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      errors.push_back(key + ": expected a boolean");
      return;
    }
    out = v.get<bool>();
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      errors.push_back(key + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void complex_value(const std::string& key, Complex& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    try {
      if (v.is_number())
        out = Complex(v.get<double>(), 0.0);
      else if (v.is_string())
        out = parse_complex(v.get<std::string>());
      else
        errors.push_back(key + ": expected a number or 'a+bi' string");
    } catch (const std::invalid_argument& e) {
      errors.push_back(key + ": " + e.what());
    }
  }

  void double_list(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      errors.push_back(key + ": expected an array of numbers");
      return;
    }
    std::vector<double> tmp;
    for (const auto& e : v) {
      if (!e.is_number()) {
        errors.push_back(key + ": expected an array of numbers");
        return;
      }
      tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
  }

  void uint_list(const std::string& key, std::vector<std::uint32_t>& out) {
    if (!has(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      errors.push_back(key + ": expected an array of integers");
      return;
    }
    std::vector<std::uint32_t> tmp;
    for (const auto& e : v) {
      if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0)) {
        errors.push_back(key + ": expected an array of nonnegative integers");
        return;
      }
      tmp.push_back(e.get<std::uint32_t>());
    }
    out = std::move(tmp);
  }
};

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw std::invalid_argument("config: expected a JSON object");

  ExperimentConfig cfg;
  Reader r{obj, {}, {}};

  r.text("kind", cfg.kind);
  r.number("n", cfg.n);
  r.number("d", cfg.d);
  r.number("trials", cfg.trials);
  r.complex_value("z", cfg.z);
  r.double_list("eta_grid", cfg.eta_grid);
  r.number("master_seed", cfg.master_seed);
  r.signed_int("threads", cfg.threads);
  r.text("out_dir", cfg.out_dir);
  r.text("format", cfg.format);
  r.number("clip", cfg.clip);
  r.number("envelope_c", cfg.envelope_c);
  r.number("varpi", cfg.varpi);
  r.uint_list("d_grid", cfg.d_grid);
  if (r.has("median_target")) {
    const json& mt = obj.at("median_target");
    if (!mt.is_object() || !mt.contains("d") || !mt.contains("eta") || !mt.contains("bound")) {
      r.errors.push_back("median_target: expected {d, eta, bound}");
    } else {
      MedianTarget t;
      t.d = mt.at("d").get<std::uint32_t>();
      t.eta = mt.at("eta").get<double>();
      t.bound = mt.at("bound").get<double>();
      cfg.median_target = t;
    }
  }
  r.number("ssv_floor", cfg.ssv_floor);
  r.number("agreement_tol", cfg.agreement_tol);
  r.number("k0", cfg.k0);
  r.number("n0", cfg.n0);
  r.number("samples", cfg.samples);
  r.boolean("exhaustive", cfg.exhaustive);
  r.text("mode", cfg.mode);
  r.text("m_kind", cfg.m_kind);
  if (r.has("probes")) {
    const json& arr = obj.at("probes");
    if (!arr.is_array()) {
      r.errors.push_back("probes: expected an array");
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& p = arr[i];
        const std::string at = "probes[" + std::to_string(i) + "]";
        if (!p.is_object()) {
          r.errors.push_back(at + ": expected an object");
          continue;
        }
        SmallBallProbe probe;
        if (p.contains("vector")) probe.vector_kind = p.at("vector").get<std::string>();
        if (p.contains("dim")) probe.dim = p.at("dim").get<std::uint32_t>();
        if (p.contains("shift")) {
          const json& s = p.at("shift");
          try {
            probe.shift = s.is_number() ? Complex(s.get<double>(), 0.0)
                                        : parse_complex(s.get<std::string>());
          } catch (const std::exception& e) {
            r.errors.push_back(at + ".shift: " + e.what());
          }
        }
        if (p.contains("radii")) probe.radii = p.at("radii").get<std::vector<double>>();
        if (p.contains("entries")) {
          for (const auto& e : p.at("entries")) {
            try {
              probe.entries.push_back(e.is_number() ? Complex(e.get<double>(), 0.0)
                                                    : parse_complex(e.get<std::string>()));
            } catch (const std::exception& ex) {
              r.errors.push_back(at + ".entries: " + ex.what());
            }
          }
        }
        cfg.probes.push_back(std::move(probe));
      }
    }
  }
  r.number("cmax", cfg.cmax);
  r.uint_list("indices", cfg.indices);
  r.number("pmpm_slack", cfg.pmpm_slack);
  r.text("pmpm_m_kind", cfg.pmpm_m_kind);
  r.number("epsilon", cfg.epsilon);
  r.number("inside_min", cfg.inside_min);
  r.number("ks_max", cfg.ks_max);
  r.boolean("mu_d_overlay", cfg.mu_d_overlay);
  r.complex_value("grid_center", cfg.grid_center);
  r.number("grid_half_width", cfg.grid_half_width);
  r.signed_int("grid_resolution", cfg.grid_resolution);
  r.number("bump_radius", cfg.bump_radius);
  r.number("bump_tol", cfg.bump_tol);
  r.number("mass_tol", cfg.mass_tol);
  r.boolean("replacement", cfg.replacement);
  r.number("replacement_radius", cfg.replacement_radius);
  r.number("replacement_tol", cfg.replacement_tol);
  r.number("envelope_x", cfg.envelope_x);
  r.number("tail_tv_bound", cfg.tail_tv_bound);
  r.number("sparsity", cfg.sparsity);
  r.number("rho", cfg.rho);
  r.text("probe", cfg.probe);

  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool used = false;
    for (const auto& s : r.seen)
      if (s == it.key()) used = true;
    if (!used) r.errors.push_back("unknown key '" + it.key() + "'");
  }
  if (!r.errors.empty()) {
    std::string msg = "config:";
    for (const auto& e : r.errors) msg += " [" + e + "]";
    throw std::invalid_argument(msg);
  }
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

Validation ExperimentConfig::validate() const {
  Validation v;
  auto err = [&](const std::string& m) { v.errors.push_back(m); };

  if (!known_kind(kind)) err("kind: '" + kind + "' is not a known experiment kind");
  if (n < 1) err("n: must be >= 1");
  if (d < 1) err("d: must be >= 1");
  if (n > 4096) err("n: dense spectral path is capped at n = 4096");
  if (trials < 1) err("trials: must be >= 1");
  if (format != "json" && format != "csv" && format != "both")
    err("format: must be json, csv or both");
  if (!(clip > 0.0)) err("clip: must be positive");
  if (!(envelope_c > 0.0)) err("envelope_c: must be positive");
  if (threads < 0) err("threads: must be >= 0");
  for (double eta : eta_grid)
    if (!(eta > 0.0)) err("eta_grid: entries must be positive");
  if (eta_grid.empty()) err("eta_grid: must not be empty");

  const bool needs_unit_disk_z =
      kind == "locallaw" || kind == "loopres";
  if (needs_unit_disk_z && !(std::norm(z) < 1.0)) err("z: requires |z| < 1 for this kind");

  if (kind == "locallaw") {
    for (std::uint32_t dv : d_grid)
      if (dv < 1) err("d_grid: entries must be >= 1");
    if (median_target) {
      bool present = d_grid.empty() ? (median_target->d == d) : false;
      for (std::uint32_t dv : d_grid)
        if (dv == median_target->d) present = true;
      if (!present) err("median_target: d not present in the d grid");
      bool eta_present = false;
      for (double e : eta_grid)
        if (e == median_target->eta) eta_present = true;
      if (!eta_present) err("median_target: eta not present in eta_grid");
    }
  }
  if (kind == "ssv") {
    if (!(ssv_floor > 0.0)) err("ssv_floor: must be positive");
    if (!(agreement_tol > 0.0)) err("agreement_tol: must be positive");
  }
  if (kind == "noholes") {
    if (k0 < 1) err("k0: must be >= 1");
    if (k0 > d) err("k0 exceeds d");
    if (n0 < 1 || n0 > n) err("n0: must satisfy 1 <= n0 <= n");
    if (exhaustive && (n > 8 || d > 3)) err("exhaustive: full enumeration is capped at n <= 8, d <= 3");
    if (!exhaustive && samples < 1) err("samples: must be >= 1");
  }
  if (kind == "concentration") {
    if (mode != "variance" && mode != "transposition" && mode != "both")
      err("mode: must be variance, transposition or both");
    if (m_kind != "zero" && m_kind != "diag_half") err("m_kind: must be zero or diag_half");
    if (mode != "variance" && trials < 1) err("trials: must be >= 1");
  }
  if (kind == "smallball") {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto& p = probes[i];
      const std::string at = "probes[" + std::to_string(i) + "]";
      if (p.vector_kind != "flat" && p.vector_kind != "basis" && p.vector_kind != "geometric" &&
          p.vector_kind != "explicit")
        err(at + ".vector: must be flat, basis, geometric or explicit");
      if (p.vector_kind == "explicit") {
        if (p.entries.empty()) err(at + ".entries: required for explicit vectors");
        if (p.entries.size() > 24)
          err(at + ".entries: at most 24 (exact enumeration costs 2^dim)");
      } else if (p.dim < 1 || p.dim > 24) {
        err(at + ".dim: must lie in [1, 24] (exact enumeration costs 2^dim)");
      }
      if (p.radii.empty()) err(at + ".radii: must not be empty");
      for (double rr : p.radii)
        if (rr < 0.0) err(at + ".radii: must be nonnegative");
    }
    if (!(cmax > 0.0)) err("cmax: must be positive");
  }
  if (kind == "pmpm") {
    for (std::uint32_t i : indices)
      if (i < 1 || i > n) err("indices: entries must lie in [1, n]");
    if (pmpm_m_kind != "identity" && pmpm_m_kind != "gaussian_unit")
      err("pmpm_m_kind: must be identity or gaussian_unit");
    if (!(pmpm_slack > 0.0)) err("pmpm_slack: must be positive");
  }
  if (kind == "girko") {
    if (grid_resolution < 3) err("grid_resolution: must be >= 3");
    if (!(grid_half_width > 0.0)) err("grid_half_width: must be positive");
  }
  if (kind == "esd") {
    if (!(epsilon >= 0.0)) err("epsilon: must be nonnegative");
    if (d < 2) err("d: esd requires d >= 2");
  }
  if (kind == "girko") {
    if (!(bump_radius > 0.0)) err("bump_radius: must be positive");
    if (bump_radius >= grid_half_width)
      err("bump_radius: must be strictly inside the grid half width");
    if (replacement && !(replacement_radius > 0.0))
      err("replacement_radius: must be positive");
  }
  if (kind == "traces") {
    if (!(envelope_x >= std::exp(1.0)))
      err("envelope_x: must be >= e for the tail envelope to apply");
  }
  if (kind == "flatcheck") {
    if (sparsity >= n) err("sparsity: must be < n");
    if (!(rho > 0.0) || !(rho < 1.0)) err("rho: must lie in (0, 1)");
    if (probe != "gaussian" && probe != "two_level") err("probe: must be gaussian or two_level");
    if (probe == "two_level" && n % 4 != 0) err("probe: two_level requires n divisible by 4");
  }
  return v;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json obj;
  obj["kind"] = cfg.kind;
  obj["n"] = cfg.n;
  obj["d"] = cfg.d;
  obj["trials"] = cfg.trials;
  obj["z"] = format_complex(cfg.z);
  obj["eta_grid"] = cfg.eta_grid;
  obj["master_seed"] = cfg.master_seed;
  // threads, out_dir and format are execution details, not experiment
  // identity: they are omitted so report bytes do not depend on them.
  obj["clip"] = cfg.clip;
  obj["envelope_c"] = cfg.envelope_c;
  obj["varpi"] = cfg.varpi;
  if (!cfg.d_grid.empty()) obj["d_grid"] = cfg.d_grid;
  if (cfg.median_target)
    obj["median_target"] = {{"d", cfg.median_target->d},
                            {"eta", cfg.median_target->eta},
                            {"bound", cfg.median_target->bound}};
  if (cfg.kind == "ssv") {
    obj["ssv_floor"] = cfg.ssv_floor;
    obj["agreement_tol"] = cfg.agreement_tol;
  }
  if (cfg.kind == "noholes") {
    obj["k0"] = cfg.k0;
    obj["n0"] = cfg.n0;
    obj["samples"] = cfg.samples;
    obj["exhaustive"] = cfg.exhaustive;
  }
  if (cfg.kind == "concentration") {
    obj["mode"] = cfg.mode;
    obj["m_kind"] = cfg.m_kind;
  }
  if (cfg.kind == "smallball") {
    json arr = json::array();
    for (const auto& p : cfg.probes) {
      json pj;
      pj["vector"] = p.vector_kind;
      pj["dim"] = p.dim;
      pj["shift"] = format_complex(p.shift);
      pj["radii"] = p.radii;
      if (!p.entries.empty()) {
        json es = json::array();
        for (Complex e : p.entries) es.push_back(format_complex(e));
        pj["entries"] = std::move(es);
      }
      arr.push_back(std::move(pj));
    }
    obj["probes"] = std::move(arr);
    obj["cmax"] = cfg.cmax;
  }
  if (cfg.kind == "pmpm") {
    obj["indices"] = cfg.indices;
    obj["pmpm_slack"] = cfg.pmpm_slack;
    obj["pmpm_m_kind"] = cfg.pmpm_m_kind;
  }
  if (cfg.kind == "esd") {
    obj["epsilon"] = cfg.epsilon;
    obj["inside_min"] = cfg.inside_min;
    obj["ks_max"] = cfg.ks_max;
    obj["mu_d_overlay"] = cfg.mu_d_overlay;
  }
  if (cfg.kind == "girko") {
    obj["grid_center"] = format_complex(cfg.grid_center);
    obj["grid_half_width"] = cfg.grid_half_width;
    obj["grid_resolution"] = cfg.grid_resolution;
    obj["bump_radius"] = cfg.bump_radius;
    obj["bump_tol"] = cfg.bump_tol;
    obj["mass_tol"] = cfg.mass_tol;
    obj["replacement"] = cfg.replacement;
    if (cfg.replacement) {
      obj["replacement_radius"] = cfg.replacement_radius;
      obj["replacement_tol"] = cfg.replacement_tol;
    }
  }
  if (cfg.kind == "traces") {
    obj["envelope_x"] = cfg.envelope_x;
    obj["tail_tv_bound"] = cfg.tail_tv_bound;
  }
  if (cfg.kind == "flatcheck") {
    obj["sparsity"] = cfg.sparsity;
    obj["rho"] = cfg.rho;
    obj["probe"] = cfg.probe;
  }
  return obj.dump(2);
}

}  // namespace permlaw::config
