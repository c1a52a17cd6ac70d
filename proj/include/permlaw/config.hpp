#pragma once

// Experiment configuration: a typed struct covering every experiment kind,
// JSON (de)serialisation with "a+bi" complex literals, and strict validation
// that reports every problem at once.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace permlaw::config {

using Complex = std::complex<double>;

// Parses "a", "bi", "a+bi", "a-bi" (no embedded spaces); throws
// std::invalid_argument on malformed input.
Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

struct SmallBallProbe {
  std::string vector_kind = "flat";  // flat | basis | geometric | explicit
  std::uint32_t dim = 10;
  Complex shift{0.0, 0.0};
  std::vector<double> radii{0.5};
  std::vector<Complex> entries;  // used by vector_kind == "explicit"
};

struct MedianTarget {
  std::uint32_t d = 0;
  double eta = 0.0;
  double bound = 0.0;
};

// Collected error list; empty means the configuration is usable.
struct Validation {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
  std::string joined() const;
};

struct ExperimentConfig {
  std::string kind;  // esd locallaw loopres ssv traces noholes concentration
                     // smallball pmpm girko flatcheck

  // Shared knobs (defaults documented in README).
  std::uint32_t n = 100;
  std::uint32_t d = 4;
  std::uint64_t trials = 10;
  Complex z{0.0, 0.0};
  std::vector<double> eta_grid{1.0};
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = all available
  std::string out_dir;
  std::string format = "json";  // json | csv | both
  double clip = 1e-30;
  double envelope_c = 1.0;  // constant C in the error envelopes
  double varpi = 1.0;       // admissibility strength

  // locallaw
  std::vector<std::uint32_t> d_grid;  // empty = just {d}
  std::optional<MedianTarget> median_target;

  // ssv
  double ssv_floor = 1e-9;
  double agreement_tol = 1e-6;

  // noholes
  std::uint32_t k0 = 2;
  std::uint32_t n0 = 2;
  std::uint64_t samples = 10000;  // sampled triples per trial
  bool exhaustive = false;

  // concentration
  std::string mode = "both";    // variance | transposition | both
  std::string m_kind = "zero";  // zero | diag_half (M = 0.5 I_n)

  // smallball
  std::vector<SmallBallProbe> probes;
  double cmax = 3.0;

  // pmpm
  std::vector<std::uint32_t> indices;  // 1-based rows in [1, n]; default {1, n/2, n}
  double pmpm_slack = 5.0;             // constant in slack * ||M||^2 / sqrt(n)
  std::string pmpm_m_kind = "identity";  // identity | gaussian_unit

  // esd
  double epsilon = 0.1;
  double inside_min = 0.99;
  double ks_max = 0.05;
  bool mu_d_overlay = false;

  // girko grids
  Complex grid_center{0.0, 0.0};
  double grid_half_width = 1.5;
  int grid_resolution = 61;
  double bump_radius = 1.3;
  double bump_tol = 0.05;
  double mass_tol = 0.05;
  bool replacement = false;          // also compare against a Ginibre baseline
  double replacement_radius = 0.7;   // restrict the comparison to |z| <= radius
  double replacement_tol = 0.1;

  // traces
  double envelope_x = 3.0;  // the x in (|z|^2+1) n + 2 |z| sqrt(d) x + d x
  double tail_tv_bound = 0.02;

  // flatcheck
  std::uint32_t sparsity = 2;          // the m in m-sparse
  double rho = 0.5;
  std::string probe = "gaussian";  // gaussian | two_level

  Validation validate() const;
};

// Builds a config from JSON text: fills documented defaults, rejects unknown
// keys and type mismatches.  IO/parse problems throw std::invalid_argument
// with every collected error in the message.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);  // full echo, sorted keys

bool known_kind(const std::string& kind);

}  // namespace permlaw::config
