#include "permlaw/runners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "permlaw/errors.hpp"
#include "permlaw/flatvec.hpp"
#include "permlaw/girko.hpp"
#include "permlaw/limitlaw.hpp"
#include "permlaw/parallel.hpp"
#include "permlaw/permmat.hpp"
#include "permlaw/rng.hpp"
#include "permlaw/spectral.hpp"

namespace permlaw::runners {

using config::ExperimentConfig;
using nlohmann::json;
using report::Criterion;
using report::ExperimentReport;
using Complex = std::complex<double>;

namespace {

// ---------------------------------------------------------------- utilities

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

Complex mean_c(const std::vector<Complex>& v) {
  Complex acc = 0.0;
  for (Complex x : v) acc += x;
  return v.empty() ? Complex(0.0) : acc / static_cast<double>(v.size());
}

// Sample variance E|x - mean|^2 with the 1/(T-1) normalisation.
double variance_c(const std::vector<Complex>& v) {
  if (v.size() < 2) return 0.0;
  const Complex m = mean_c(v);
  double acc = 0.0;
  for (Complex x : v) acc += std::norm(x - m);
  return acc / static_cast<double>(v.size() - 1);
}

double mean_d(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_d(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

ExperimentReport base_report(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  rep.config_echo = json::parse(config::config_to_json(cfg));
  rep.master_seed = cfg.master_seed;
  return rep;
}

void add_criterion(ExperimentReport& rep, const std::string& name, double value, double bound,
                   const std::string& relation) {
  Criterion c;
  c.name = name;
  c.value = value;
  c.bound = bound;
  c.relation = relation;
  if (relation == "<=")
    c.pass = value <= bound;
  else if (relation == ">=")
    c.pass = value >= bound;
  else if (relation == "<")
    c.pass = value < bound;
  else
    throw std::invalid_argument("add_criterion: unknown relation " + relation);
  rep.criteria.push_back(std::move(c));
}

void add_criterion_forced(ExperimentReport& rep, const std::string& name, double value,
                          double bound, const std::string& relation, bool pass) {
  Criterion c;
  c.name = name;
  c.value = value;
  c.bound = bound;
  c.relation = relation;
  c.pass = pass;
  rep.criteria.push_back(std::move(c));
}

// ------------------------------------------------------------------- traces

}  // namespace

ExperimentReport run_traces(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  const std::uint32_t n = cfg.n, d = cfg.d;
  const double sqd = std::sqrt(static_cast<double>(d));

  std::vector<json> rows(T);
  std::vector<double> fps(T), trss(T), trq(T);
  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto s = permmat::PermutationSum::sample(n, d, rng);
    const std::uint32_t fp = permmat::fixed_points(s.perm(0));
    const std::uint64_t tr_s = s.trace();
    const std::uint64_t tr_ss = s.trace_ssstar();
    const double q = std::norm(cfg.z) * n -
                     2.0 * cfg.z.real() * static_cast<double>(tr_s) / sqd +
                     static_cast<double>(tr_ss) / d;
    fps[t] = fp;
    trss[t] = static_cast<double>(tr_ss);
    trq[t] = q;
    rows[t] = json{{"fixed_points", fp},
                   {"trace_s", tr_s},
                   {"trace_ssstar", tr_ss},
                   {"trace_q", q}};
  });
  rep.trials = std::move(rows);
  rep.streams_used = T;

  // (a) tails of the fixed point count of one uniform permutation vs 1/k!.
  json tail = json::array();
  for (int k = 1; k <= 5; ++k) {
    double cnt = 0;
    for (double f : fps)
      if (f >= k) cnt += 1.0;
    const double phat = cnt / static_cast<double>(T);
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    const double q = 1.0 / kfact;
    const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(T));
    tail.push_back({{"k", k}, {"p_hat", phat}, {"bound", q}, {"sigma", sigma}});
    add_criterion(rep, "fixed_point_tail_k" + std::to_string(k), phat, q + 3.0 * sigma, "<=");
  }

  // Total variation against Poisson(1).
  std::vector<double> hist(64, 0.0);
  for (double f : fps)
    if (f < 64) hist[static_cast<std::size_t>(f)] += 1.0;
  double tv = 0.0, pk = std::exp(-1.0);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    tv += std::abs(hist[k] / static_cast<double>(T) - pk);
    pk /= static_cast<double>(k + 1);
  }
  tv *= 0.5;
  add_criterion(rep, "fixed_point_tv_poisson", tv, cfg.tail_tv_bound, "<=");

  // (b) mean Tr S S* against n d + d (d - 1).
  const double expect_ss = static_cast<double>(n) * d + static_cast<double>(d) * (d - 1);
  const double mean_ss = mean_d(trss);
  const double se_ss = sample_sd(trss) / std::sqrt(static_cast<double>(T));
  add_criterion(rep, "trace_ssstar_mean_dev", std::abs(mean_ss - expect_ss), 3.0 * se_ss, "<=");

  // (c) mean Tr Q against the tail envelope at the configured x.
  const double x = cfg.envelope_x;
  const double envelope =
      (std::norm(cfg.z) + 1.0) * n + 2.0 * std::abs(cfg.z) * sqd * x + static_cast<double>(d) * x;
  add_criterion(rep, "trace_q_mean_envelope", mean_d(trq), envelope, "<=");

  rep.summary = json{{"tails", tail},
                     {"tv_poisson", tv},
                     {"mean_trace_ssstar", mean_ss},
                     {"expected_trace_ssstar", expect_ss},
                     {"stderr_trace_ssstar", se_ss},
                     {"mean_trace_q", mean_d(trq)},
                     {"trace_q_envelope", envelope}};
  return rep;
}

// ----------------------------------------------------------------- locallaw

ExperimentReport run_locallaw(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  std::vector<std::uint32_t> d_list = cfg.d_grid.empty()
                                          ? std::vector<std::uint32_t>{cfg.d}
                                          : cfg.d_grid;
  const std::uint64_t T = cfg.trials;
  const std::size_t cells = d_list.size();
  const std::size_t etas = cfg.eta_grid.size();

  struct Obs {
    double diff = 0.0, bound = 0.0, wtm_re = 0.0, wtm_im = 0.0, wtm_inf_im = 0.0;
    bool admissible = false;
  };
  std::vector<Obs> obs(cells * T * etas);

  // Stream layout: d cell index * trials + trial.
  parallel_for(static_cast<std::int64_t>(cells * T), resolve_threads(cfg.threads),
               [&](std::int64_t idx) {
                 const std::size_t di = static_cast<std::size_t>(idx) / T;
                 const std::uint64_t t = static_cast<std::uint64_t>(idx) % T;
                 const std::uint32_t d = d_list[di];
                 RngStream rng(cfg.master_seed, idx);
                 const auto s = permmat::PermutationSum::sample(cfg.n, d, rng);
                 const auto a = spectral::build_shifted(s, cfg.z);
                 const auto spec = spectral::singular_values(a);
                 for (std::size_t e = 0; e < etas; ++e) {
                   const double eta = cfg.eta_grid[e];
                   Obs& o = obs[(di * T + t) * etas + e];
                   if (!limitlaw::locallaw_admissible(cfg.n, d, eta, cfg.varpi)) continue;
                   const Complex wtm = spectral::stieltjes_sym(spec, Complex(0.0, eta));
                   const Complex wtm_inf = limitlaw::wtm_infinity(cfg.z, eta);
                   o.admissible = true;
                   o.diff = std::abs(wtm - wtm_inf);
                   o.bound = limitlaw::locallaw_bound(cfg.n, d, eta, cfg.envelope_c);
                   o.wtm_re = wtm.real();
                   o.wtm_im = wtm.imag();
                   o.wtm_inf_im = wtm_inf.imag();
                 }
               });

  rep.streams_used = cells * T;
  rep.trials.reserve(cells * T * etas);
  std::uint64_t skipped = 0;
  double max_ratio = 0.0;
  for (std::size_t di = 0; di < cells; ++di)
    for (std::uint64_t t = 0; t < T; ++t)
      for (std::size_t e = 0; e < etas; ++e) {
        const Obs& o = obs[(di * T + t) * etas + e];
        rep.trials.push_back(json{{"d", d_list[di]},
                                  {"trial", t},
                                  {"eta", cfg.eta_grid[e]},
                                  {"admissible", o.admissible},
                                  {"wtm_re", o.wtm_re},
                                  {"wtm_im", o.wtm_im},
                                  {"wtm_inf_im", o.wtm_inf_im},
                                  {"diff", o.diff},
                                  {"bound", o.bound}});
        if (!o.admissible)
          ++skipped;
        else if (o.bound > 0.0)
          max_ratio = std::max(max_ratio, o.diff / o.bound);
      }

  // Per-cell medians and the d-monotonicity diagnostics.
  json cells_json = json::array();
  std::vector<std::vector<double>> med(etas);  // medians per eta along d_list
  for (std::size_t di = 0; di < cells; ++di)
    for (std::size_t e = 0; e < etas; ++e) {
      std::vector<double> diffs;
      for (std::uint64_t t = 0; t < T; ++t) {
        const Obs& o = obs[(di * T + t) * etas + e];
        if (o.admissible) diffs.push_back(o.diff);
      }
      const bool have = !diffs.empty();
      const double m = median(diffs);
      const double mx = diffs.empty() ? 0.0 : *std::max_element(diffs.begin(), diffs.end());
      cells_json.push_back({{"d", d_list[di]},
                            {"eta", cfg.eta_grid[e]},
                            {"admissible_trials", diffs.size()},
                            {"median_diff", m},
                            {"max_diff", mx}});
      if (have) med[e].push_back(m);
    }

  if (cells >= 2) {
    for (std::size_t e = 0; e < etas; ++e) {
      if (med[e].size() != cells) continue;  // incomplete column: no diagnostic
      double worst = -1e300;
      for (std::size_t di = 0; di + 1 < cells; ++di)
        worst = std::max(worst, med[e][di + 1] - med[e][di]);
      add_criterion(rep, "median_decreasing_in_d_eta=" + fmt(cfg.eta_grid[e]), worst, 0.0, "<");
    }
  }

  // Medians per eta pooled over the d sweep (admissible rows only), with the
  // eta^3-compensated value used for error-shape diagnostics.
  json pooled = json::array();
  for (std::size_t e = 0; e < etas; ++e) {
    std::vector<double> diffs;
    for (std::size_t di = 0; di < cells; ++di)
      for (std::uint64_t t = 0; t < T; ++t) {
        const Obs& o = obs[(di * T + t) * etas + e];
        if (o.admissible) diffs.push_back(o.diff);
      }
    if (diffs.empty()) continue;
    const double eta = cfg.eta_grid[e];
    const double m = median(diffs);
    pooled.push_back({{"eta", eta},
                      {"admissible_rows", diffs.size()},
                      {"median_diff", m},
                      {"scaled_median", eta * eta * eta * m}});
  }

  add_criterion(rep, "envelope_max_ratio", max_ratio, 1.0, "<=");

  if (cfg.median_target) {
    bool found = false;
    double m = 0.0;
    for (std::size_t di = 0; di < cells; ++di)
      for (std::size_t e = 0; e < etas; ++e)
        if (d_list[di] == cfg.median_target->d && cfg.eta_grid[e] == cfg.median_target->eta) {
          std::vector<double> diffs;
          for (std::uint64_t t = 0; t < T; ++t) {
            const Obs& o = obs[(di * T + t) * etas + e];
            if (o.admissible) diffs.push_back(o.diff);
          }
          if (!diffs.empty()) {
            found = true;
            m = median(diffs);
          }
        }
    if (found)
      add_criterion(rep, "median_target", m, cfg.median_target->bound, "<=");
    else
      add_criterion_forced(rep, "median_target", -1.0, cfg.median_target->bound, "<=", false);
  }

  rep.summary = json{{"cells", cells_json},
                     {"medians_per_eta", pooled},
                     {"skipped_rows", skipped},
                     {"envelope_max_ratio", max_ratio}};
  return rep;
}

// ------------------------------------------------------------------ loopres

ExperimentReport run_loopres(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  const std::size_t etas = cfg.eta_grid.size();
  const double nn = static_cast<double>(cfg.n);
  const double dterm = std::max(1.0 / std::sqrt(static_cast<double>(cfg.d)),
                                std::pow(nn, -0.25) * std::log(nn));

  struct Obs {
    double residual = 0.0, envelope = 0.0;
  };
  std::vector<Obs> obs(T * etas);
  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto s = permmat::PermutationSum::sample(cfg.n, cfg.d, rng);
    const auto spec = spectral::singular_values(spectral::build_shifted(s, cfg.z));
    for (std::size_t e = 0; e < etas; ++e) {
      const double eta = cfg.eta_grid[e];
      const Complex wtm = spectral::stieltjes_sym(spec, Complex(0.0, eta));
      Obs& o = obs[t * etas + e];
      o.residual = std::abs(limitlaw::loop_residual(wtm, Complex(0.0, eta), cfg.z));
      o.envelope = cfg.envelope_c * dterm / (eta * eta * eta) * (1.0 + std::abs(wtm));
    }
  });
  rep.streams_used = T;

  std::uint64_t within = 0;
  double limit_residual_max = 0.0;
  for (std::size_t e = 0; e < etas; ++e) {
    const double eta = cfg.eta_grid[e];
    limit_residual_max =
        std::max(limit_residual_max,
                 std::abs(limitlaw::loop_residual(limitlaw::wtm_infinity(cfg.z, eta),
                                                  Complex(0.0, eta), cfg.z)));
  }
  for (std::uint64_t t = 0; t < T; ++t)
    for (std::size_t e = 0; e < etas; ++e) {
      const Obs& o = obs[t * etas + e];
      rep.trials.push_back(json{{"trial", t},
                                {"eta", cfg.eta_grid[e]},
                                {"residual", o.residual},
                                {"envelope", o.envelope},
                                {"within", o.residual <= o.envelope}});
      if (o.residual <= o.envelope) ++within;
    }
  const double rate =
      static_cast<double>(within) / static_cast<double>(std::max<std::uint64_t>(1, T * etas));
  add_criterion(rep, "envelope_rate", rate, 0.95, ">=");
  add_criterion(rep, "limit_residual_max", limit_residual_max, 1e-10, "<=");
  rep.summary = json{{"envelope_rate", rate}, {"limit_residual_max", limit_residual_max}};
  return rep;
}

// ---------------------------------------------------------------------- ssv

ExperimentReport run_ssv(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;

  struct Obs {
    double smin = 0.0, smin_invit = 0.0, rel = 0.0;
    bool invit_ok = true;
  };
  std::vector<Obs> obs(T);
  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto s = permmat::PermutationSum::sample(cfg.n, cfg.d, rng);
    const auto a = spectral::build_shifted(s, cfg.z);
    Obs& o = obs[t];
    o.smin = spectral::smallest_singular(a);
    try {
      o.smin_invit = spectral::smallest_singular_inverse_iteration(a);
      o.rel = std::abs(o.smin - o.smin_invit) / std::max(o.smin, 1e-300);
    } catch (const NumericError&) {
      o.invit_ok = false;
      o.smin_invit = 0.0;
      o.rel = 1.0;
    }
  });
  rep.streams_used = T;

  std::vector<double> smins;
  double max_rel = 0.0;
  std::uint64_t invit_failures = 0;
  for (std::uint64_t t = 0; t < T; ++t) {
    const Obs& o = obs[t];
    rep.trials.push_back(json{{"trial", t},
                              {"smin", o.smin},
                              {"smin_invit", o.smin_invit},
                              {"rel_agreement", o.rel},
                              {"invit_ok", o.invit_ok}});
    smins.push_back(o.smin);
    max_rel = std::max(max_rel, o.rel);
    if (!o.invit_ok) ++invit_failures;
  }
  const double minv = *std::min_element(smins.begin(), smins.end());
  add_criterion(rep, "min_smin", minv, cfg.ssv_floor, ">=");
  add_criterion(rep, "max_rel_agreement", max_rel, cfg.agreement_tol, "<=");

  // Asymptotic-scale context (not a gate): threshold n^{-log n / log(d^n)}
  // and the failure probability envelope log^4(n)/sqrt(d^n), d^n = min(d, n).
  const double dn = static_cast<double>(std::min(cfg.d, cfg.n));
  const double nn = static_cast<double>(cfg.n);
  const double thr = std::pow(nn, -std::log(nn) / std::log(std::max(2.0, dn)));
  const double failp = std::pow(std::log(nn), 4.0) / std::sqrt(dn);
  rep.summary = json{{"min_smin", minv},
                     {"median_smin", median(smins)},
                     {"q05_smin", quantile(smins, 0.05)},
                     {"max_rel_agreement", max_rel},
                     {"invit_failures", invit_failures},
                     {"predicted_scale_threshold", thr},
                     {"predicted_scale_fail_prob", failp}};
  return rep;
}

// ------------------------------------------------------------------ noholes

ExperimentReport run_noholes(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  const std::uint32_t n = cfg.n, d = cfg.d, k0 = cfg.k0, n0 = cfg.n0;

  struct Obs {
    std::uint64_t checked = 0, violations = 0;
    double min_ratio = 1e300, mean_e = 0.0;
  };
  std::vector<Obs> obs(T);

  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto s = permmat::PermutationSum::sample(n, d, rng);
    Obs& o = obs[t];
    double esum = 0.0;

    const auto record = [&](std::uint64_t e, std::uint64_t lsz, std::uint64_t isz,
                            std::uint64_t jsz) {
      const double rhs =
          static_cast<double>(lsz) * isz * jsz / (2.0 * static_cast<double>(n));
      ++o.checked;
      esum += static_cast<double>(e);
      if (static_cast<double>(e) < rhs) ++o.violations;
      if (rhs > 0.0) o.min_ratio = std::min(o.min_ratio, static_cast<double>(e) / rhs);
    };

    if (cfg.exhaustive) {
      // Full enumeration over subsets; n <= 8 and d <= 3 are enforced by
      // validation, so the bitmask loops stay tiny.
      std::vector<std::uint32_t> popn(1u << n);
      for (std::uint32_t m = 1; m < (1u << n); ++m) popn[m] = popn[m >> 1] + (m & 1);
      for (std::uint32_t lmask = 1; lmask < (1u << d); ++lmask) {
        std::uint32_t lsz = 0;
        for (std::uint32_t b = 0; b < d; ++b)
          if (lmask & (1u << b)) ++lsz;
        if (lsz < k0) continue;
        for (std::uint32_t imask = 1; imask < (1u << n); ++imask) {
          if (popn[imask] < n0) continue;
          for (std::uint32_t jmask = 1; jmask < (1u << n); ++jmask) {
            if (popn[jmask] < n0) continue;
            std::uint64_t e = 0;
            for (std::uint32_t l = 0; l < d; ++l) {
              if (!(lmask & (1u << l))) continue;
              const auto& p = s.perm(l);
              for (std::uint32_t i = 1; i <= n; ++i)
                if ((imask & (1u << (i - 1))) && (jmask & (1u << (p(i) - 1)))) ++e;
            }
            record(e, lsz, popn[imask], popn[jmask]);
          }
        }
      }
    } else {
      std::vector<std::uint32_t> pool_l(d), pool_i(n), pool_j(n);
      std::vector<std::uint8_t> in_j(n + 1);
      for (std::uint64_t rep_i = 0; rep_i < cfg.samples; ++rep_i) {
        // Partial Fisher-Yates draws of L, I, J with the trial stream.
        for (std::uint32_t i = 0; i < d; ++i) pool_l[i] = i;
        for (std::uint32_t i = 0; i < n; ++i) pool_i[i] = i + 1;
        for (std::uint32_t i = 0; i < n; ++i) pool_j[i] = i + 1;
        for (std::uint32_t i = 0; i < k0; ++i)
          std::swap(pool_l[i], pool_l[i + rng.uniform_below(d - i)]);
        for (std::uint32_t i = 0; i < n0; ++i)
          std::swap(pool_i[i], pool_i[i + rng.uniform_below(n - i)]);
        for (std::uint32_t i = 0; i < n0; ++i)
          std::swap(pool_j[i], pool_j[i + rng.uniform_below(n - i)]);
        std::fill(in_j.begin(), in_j.end(), 0);
        for (std::uint32_t i = 0; i < n0; ++i) in_j[pool_j[i]] = 1;
        std::uint64_t e = 0;
        for (std::uint32_t li = 0; li < k0; ++li) {
          const auto& p = s.perm(pool_l[li]);
          for (std::uint32_t ii = 0; ii < n0; ++ii)
            if (in_j[p(pool_i[ii])]) ++e;
        }
        record(e, k0, n0, n0);
      }
    }
    o.mean_e = o.checked ? esum / static_cast<double>(o.checked) : 0.0;
  });
  rep.streams_used = T;

  std::uint64_t total_checked = 0, total_violations = 0;
  double min_ratio = 1e300;
  for (std::uint64_t t = 0; t < T; ++t) {
    const Obs& o = obs[t];
    rep.trials.push_back(json{{"trial", t},
                              {"checked", o.checked},
                              {"violations", o.violations},
                              {"min_ratio", o.min_ratio >= 1e300 ? 0.0 : o.min_ratio},
                              {"mean_e", o.mean_e}});
    total_checked += o.checked;
    total_violations += o.violations;
    min_ratio = std::min(min_ratio, o.min_ratio);
  }
  add_criterion(rep, "violations", static_cast<double>(total_violations), 0.0, "<=");
  add_criterion(rep, "min_ratio", min_ratio >= 1e300 ? 0.0 : min_ratio, 1.0, ">=");
  rep.summary = json{{"checked", total_checked},
                     {"violations", total_violations},
                     {"min_ratio", min_ratio >= 1e300 ? 0.0 : min_ratio},
                     {"expected_e_sampled",
                      static_cast<double>(k0) * n0 * n0 / static_cast<double>(n)}};
  return rep;
}

// ------------------------------------------------------------ concentration

ExperimentReport run_concentration(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  const std::uint32_t n = cfg.n, d = cfg.d;
  const bool do_var = cfg.mode == "variance" || cfg.mode == "both";
  const bool do_lip = cfg.mode == "transposition" || cfg.mode == "both";

  Eigen::MatrixXcd m_pert;  // empty = zero perturbation
  double m_norm = 0.0;
  if (cfg.m_kind == "diag_half") {
    m_pert = 0.5 * Eigen::MatrixXcd::Identity(n, n);
    m_norm = 0.5;
  }

  struct Obs {
    Complex f11, f12, f21, f22;
    double delta[4] = {0, 0, 0, 0};
    std::uint64_t hamming = 0;
  };
  const std::size_t etas = cfg.eta_grid.size();
  std::vector<Obs> obs(T * etas);

  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto s = permmat::PermutationSum::sample(n, d, rng);
    const auto a = spectral::build_shifted(s, cfg.z);

    // Draw order after the matrix: permutation slot, then the two positions.
    std::uint32_t ell = 0, pa = 1, pb = 2;
    permmat::PermutationSum s2 = s;
    if (do_lip) {
      ell = static_cast<std::uint32_t>(rng.uniform_below(d));
      pa = 1 + static_cast<std::uint32_t>(rng.uniform_below(n));
      pb = 1 + static_cast<std::uint32_t>(rng.uniform_below(n - 1));
      if (pb >= pa) ++pb;
      std::vector<permmat::Permutation> ps = s.perms();
      ps[ell] = ps[ell].with_transposition(pa, pb);
      s2 = permmat::PermutationSum(n, std::move(ps));
    }

    for (std::size_t e = 0; e < etas; ++e) {
      const Complex xi(0.0, cfg.eta_grid[e]);
      Obs& o = obs[t * etas + e];
      const auto tr = spectral::block_resolvent_traces(a, xi, m_pert);
      o.f11 = tr.f11;
      o.f12 = tr.f12;
      o.f21 = tr.f21;
      o.f22 = tr.f22;
      if (do_lip) {
        const auto a2 = spectral::build_shifted(s2, cfg.z);
        const auto tr2 = spectral::block_resolvent_traces(a2, xi, m_pert);
        o.delta[0] = std::abs(tr.f11 - tr2.f11);
        o.delta[1] = std::abs(tr.f12 - tr2.f12);
        o.delta[2] = std::abs(tr.f21 - tr2.f21);
        o.delta[3] = std::abs(tr.f22 - tr2.f22);
        o.hamming = s.hamming_distance_to(s2);
      }
    }
  });
  rep.streams_used = T;

  json summary_cells = json::array();
  for (std::size_t e = 0; e < etas; ++e) {
    const double eta = cfg.eta_grid[e];
    const double c0 = std::max({1.0, eta, m_norm});
    std::vector<Complex> f11, f12, f21, f22;
    double max_delta = 0.0;
    for (std::uint64_t t = 0; t < T; ++t) {
      const Obs& o = obs[t * etas + e];
      f11.push_back(o.f11);
      f12.push_back(o.f12);
      f21.push_back(o.f21);
      f22.push_back(o.f22);
      for (double dv : o.delta) max_delta = std::max(max_delta, dv);
    }
    const double var_bound = std::pow(static_cast<double>(n), -0.75);
    const double lip_bound = 16.0 * std::pow(c0, 4.0) * 2.0 /
                             (static_cast<double>(n) * std::sqrt(static_cast<double>(d)) *
                              eta * eta);
    json cell{{"eta", eta},
              {"var_f11", variance_c(f11)},
              {"var_f12", variance_c(f12)},
              {"var_f21", variance_c(f21)},
              {"var_f22", variance_c(f22)},
              {"variance_bound", var_bound},
              {"premise_eta_gt", std::pow(static_cast<double>(n), -1.0 / 16.0)},
              {"max_transposition_delta", max_delta},
              {"transposition_bound", lip_bound},
              {"c0", c0}};
    summary_cells.push_back(cell);
    if (do_var) {
      add_criterion(rep, "variance_f11_eta=" + fmt(eta), variance_c(f11), var_bound, "<=");
      add_criterion(rep, "variance_f12_eta=" + fmt(eta), variance_c(f12), var_bound, "<=");
      add_criterion(rep, "variance_f21_eta=" + fmt(eta), variance_c(f21), var_bound, "<=");
      add_criterion(rep, "variance_f22_eta=" + fmt(eta), variance_c(f22), var_bound, "<=");
    }
    if (do_lip)
      add_criterion(rep, "transposition_max_delta_eta=" + fmt(eta), max_delta, lip_bound, "<=");
  }

  for (std::uint64_t t = 0; t < T; ++t)
    for (std::size_t e = 0; e < etas; ++e) {
      const Obs& o = obs[t * etas + e];
      rep.trials.push_back(json{{"trial", t},
                                {"eta", cfg.eta_grid[e]},
                                {"f11_re", o.f11.real()},
                                {"f11_im", o.f11.imag()},
                                {"f12_re", o.f12.real()},
                                {"f12_im", o.f12.imag()},
                                {"f21_re", o.f21.real()},
                                {"f21_im", o.f21.imag()},
                                {"f22_re", o.f22.real()},
                                {"f22_im", o.f22.imag()},
                                {"delta_f11", o.delta[0]},
                                {"delta_f12", o.delta[1]},
                                {"delta_f21", o.delta[2]},
                                {"delta_f22", o.delta[3]},
                                {"hamming", o.hamming}});
    }
  rep.summary = json{{"cells", summary_cells}};
  return rep;
}

// ---------------------------------------------------------------- smallball

namespace {

Eigen::VectorXcd build_probe_vector(const config::SmallBallProbe& p) {
  if (p.vector_kind == "explicit") {
    Eigen::VectorXcd v(p.entries.size());
    for (std::size_t i = 0; i < p.entries.size(); ++i) v[i] = p.entries[i];
    return v;
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(p.dim);
  if (p.vector_kind == "flat") {
    v.setConstant(1.0 / std::sqrt(static_cast<double>(p.dim)));
  } else if (p.vector_kind == "basis") {
    v[0] = 1.0;
  } else {  // geometric, normalised to unit norm
    for (std::uint32_t j = 0; j < p.dim; ++j) v[j] = std::pow(2.0, -static_cast<double>(j + 1));
    v /= v.norm();
  }
  return v;
}

// Exact P(|shift + sum_j eps_j v_j| <= r) for each radius by Gray-code
// enumeration of the 2^dim sign patterns.
std::vector<double> exact_smallball(const Eigen::VectorXcd& v, Complex shift,
                                    const std::vector<double>& radii) {
  const int dim = static_cast<int>(v.size());
  std::vector<std::uint64_t> counts(radii.size(), 0);
  std::vector<int> sign(dim, 1);
  Complex sum = shift;
  for (int j = 0; j < dim; ++j) sum += v[j];
  const std::uint64_t total = 1ull << dim;
  for (std::uint64_t i = 0;; ++i) {
    const double a = std::abs(sum);
    for (std::size_t r = 0; r < radii.size(); ++r)
      if (a <= radii[r]) ++counts[r];
    if (i + 1 == total) break;
    const int b = __builtin_ctzll(i + 1);
    sign[b] = -sign[b];
    sum += 2.0 * static_cast<double>(sign[b]) * v[b];
  }
  std::vector<double> out(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r)
    out[r] = static_cast<double>(counts[r]) / static_cast<double>(total);
  return out;
}

}  // namespace

ExperimentReport run_smallball(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  std::vector<config::SmallBallProbe> probes = cfg.probes;
  if (probes.empty()) {
    // Documented default family: flat, basis and generic decaying vectors,
    // real and complex shifts; radii avoid the achievable lattice values.
    probes.push_back({"flat", 10, {0.0, 0.0}, {0.125, 0.5, 1.0}, {}});
    probes.push_back({"basis", 10, {0.0, 0.0}, {0.5}, {}});
    probes.push_back({"basis", 10, {1.0, 0.0}, {0.5}, {}});
    probes.push_back({"flat", 10, {0.3, 0.4}, {0.25, 0.5}, {}});
    probes.push_back({"geometric", 12, {0.0, 0.0}, {0.1, 0.5}, {}});
    probes.push_back({"flat", 20, {0.0, 0.0}, {0.5}, {}});
  }

  struct Obs {
    std::vector<double> p_hat, p_exact, sigma, c_hat;
    double vnorm2 = 0.0, vinf = 0.0;
  };
  std::vector<Obs> obs(probes.size());

  parallel_for(static_cast<std::int64_t>(probes.size()), resolve_threads(cfg.threads),
               [&](std::int64_t pi) {
                 const auto& p = probes[pi];
                 const Eigen::VectorXcd v = build_probe_vector(p);
                 const int dim = static_cast<int>(v.size());
                 Obs& o = obs[pi];
                 o.vnorm2 = v.norm();
                 o.vinf = v.cwiseAbs().maxCoeff();
                 o.p_exact = exact_smallball(v, p.shift, p.radii);

                 std::vector<std::uint64_t> counts(p.radii.size(), 0);
                 RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(pi));
                 for (std::uint64_t t = 0; t < cfg.trials; ++t) {
                   Complex sum = p.shift;
                   std::uint64_t bits = 0;
                   int have = 0;
                   for (int j = 0; j < dim; ++j) {
                     if (have == 0) {
                       bits = rng.next_u64();
                       have = 64;
                     }
                     sum += (bits & 1ull) ? v[j] : -v[j];
                     bits >>= 1;
                     --have;
                   }
                   const double a = std::abs(sum);
                   for (std::size_t r = 0; r < p.radii.size(); ++r)
                     if (a <= p.radii[r]) ++counts[r];
                 }
                 for (std::size_t r = 0; r < p.radii.size(); ++r) {
                   const double ph =
                       static_cast<double>(counts[r]) / static_cast<double>(cfg.trials);
                   o.p_hat.push_back(ph);
                   const double pe = o.p_exact[r];
                   o.sigma.push_back(std::sqrt(pe * (1.0 - pe) / static_cast<double>(cfg.trials)));
                   o.c_hat.push_back(ph * o.vnorm2 / (p.radii[r] + o.vinf));
                 }
               });
  rep.streams_used = probes.size();

  double max_chat = 0.0;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const auto& p = probes[pi];
    const Obs& o = obs[pi];
    for (std::size_t r = 0; r < p.radii.size(); ++r) {
      rep.trials.push_back(json{{"probe", pi},
                                {"vector", p.vector_kind},
                                {"dim", p.dim},
                                {"shift", config::format_complex(p.shift)},
                                {"radius", p.radii[r]},
                                {"p_hat", o.p_hat[r]},
                                {"p_exact", o.p_exact[r]},
                                {"sigma", o.sigma[r]},
                                {"c_hat", o.c_hat[r]}});
      const std::string tag = "probe" + std::to_string(pi) + "_r" + fmt(p.radii[r]);
      add_criterion(rep, tag + "_match", std::abs(o.p_hat[r] - o.p_exact[r]),
                    3.0 * o.sigma[r], "<=");
      max_chat = std::max(max_chat, o.c_hat[r]);
    }
  }
  add_criterion(rep, "max_c_hat", max_chat, cfg.cmax, "<=");
  rep.summary = json{{"max_c_hat", max_chat}, {"probes", probes.size()}};
  return rep;
}

// --------------------------------------------------------------------- pmpm

ExperimentReport run_pmpm(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint32_t n = cfg.n;
  const std::uint64_t T = cfg.trials;
  std::vector<std::uint32_t> indices = cfg.indices;
  if (indices.empty()) indices = {1, std::max<std::uint32_t>(1, n / 2), n};

  // The projected matrix BP = [[0, P - J/n], [(P - J/n)^T, 0]] acts on C^{2n}.
  // With M = identity the two M-multiplications are skipped.
  const bool identity_m = cfg.pmpm_m_kind == "identity";
  Eigen::MatrixXcd m_mat;
  double m_norm = 1.0;
  Complex avg_diag_top = 1.0, avg_diag_bot = 1.0;  // (1/n) sums of M_{jj}, M_{n+j,n+j}
  if (!identity_m) {
    RngStream mrng(cfg.master_seed, UINT64_MAX);  // documented auxiliary stream
    m_mat.resize(2 * n, 2 * n);
    for (std::uint32_t i = 0; i < 2 * n; ++i)
      for (std::uint32_t j = 0; j < 2 * n; ++j) m_mat(i, j) = mrng.complex_normal();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m_mat);
    m_mat /= svd.singularValues()[0];
    m_norm = 1.0;
    avg_diag_top = m_mat.topLeftCorner(n, n).diagonal().sum() / static_cast<double>(n);
    avg_diag_bot = m_mat.bottomRightCorner(n, n).diagonal().sum() / static_cast<double>(n);
  }

  struct Entry {
    Complex q11, q21, q22, q12;  // (i,i), (n+i,i), (n+i,n+i), (i,n+i)
  };
  std::vector<Entry> obs(T * indices.size());

  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto perm = permmat::sample_permutation(n, rng);
    const auto inv = perm.inverse();

    const auto apply_bp = [&](const Eigen::VectorXcd& u) {
      Eigen::VectorXcd out(2 * n);
      const Complex mean_top = u.head(n).sum() / static_cast<double>(n);
      const Complex mean_bot = u.tail(n).sum() / static_cast<double>(n);
      for (std::uint32_t i = 1; i <= n; ++i) out[i - 1] = u[n + perm(i) - 1] - mean_bot;
      for (std::uint32_t j = 1; j <= n; ++j) out[n + j - 1] = u[inv(j) - 1] - mean_top;
      return out;
    };
    const auto apply_m = [&](const Eigen::VectorXcd& u) {
      return identity_m ? u : Eigen::VectorXcd(m_mat * u);
    };

    for (std::size_t ii = 0; ii < indices.size(); ++ii) {
      const std::uint32_t i = indices[ii];
      Entry& e = obs[t * indices.size() + ii];
      Eigen::VectorXcd col = Eigen::VectorXcd::Zero(2 * n);
      col[i - 1] = 1.0;
      Eigen::VectorXcd w = apply_bp(apply_m(apply_bp(apply_m(col))));
      e.q11 = w[i - 1];
      e.q21 = w[n + i - 1];
      col.setZero();
      col[n + i - 1] = 1.0;
      w = apply_bp(apply_m(apply_bp(apply_m(col))));
      e.q22 = w[n + i - 1];
      e.q12 = w[i - 1];
    }
  });
  rep.streams_used = T;

  for (std::uint64_t t = 0; t < T; ++t) {
    json row{{"trial", t}};
    for (std::size_t ii = 0; ii < indices.size(); ++ii) {
      const Entry& e = obs[t * indices.size() + ii];
      const std::string tag = "i" + std::to_string(indices[ii]);
      row[tag + "_q11_re"] = e.q11.real();
      row[tag + "_q11_im"] = e.q11.imag();
      row[tag + "_q21_re"] = e.q21.real();
      row[tag + "_q21_im"] = e.q21.imag();
      row[tag + "_q22_re"] = e.q22.real();
      row[tag + "_q22_im"] = e.q22.imag();
      row[tag + "_q12_re"] = e.q12.real();
      row[tag + "_q12_im"] = e.q12.imag();
    }
    rep.trials.push_back(std::move(row));
  }

  const double base_slack = cfg.pmpm_slack * m_norm * m_norm / std::sqrt(static_cast<double>(n));
  json idx_summary = json::array();
  for (std::size_t ii = 0; ii < indices.size(); ++ii) {
    const std::uint32_t i = indices[ii];
    std::vector<Complex> q11, q21, q22, q12;
    for (std::uint64_t t = 0; t < T; ++t) {
      const Entry& e = obs[t * indices.size() + ii];
      q11.push_back(e.q11);
      q21.push_back(e.q21);
      q22.push_back(e.q22);
      q12.push_back(e.q12);
    }
    const auto main_11 = identity_m ? avg_diag_bot : m_mat(i - 1, i - 1) * avg_diag_bot;
    const auto main_22 = identity_m ? avg_diag_top : m_mat(n + i - 1, n + i - 1) * avg_diag_top;
    const Complex main_21 = identity_m ? Complex(0.0) : m_mat(n + i - 1, i - 1) * avg_diag_top;
    const Complex main_12 = identity_m ? Complex(0.0) : m_mat(i - 1, n + i - 1) * avg_diag_bot;
    const auto check = [&](const char* blk, const std::vector<Complex>& q, Complex main) {
      const Complex mean = mean_c(q);
      const double sd = std::sqrt(variance_c(q));
      const double se = sd / std::sqrt(static_cast<double>(T));
      const double bound = base_slack + 3.0 * se;
      add_criterion(rep, "i" + std::to_string(i) + "_" + blk, std::abs(mean - main), bound, "<=");
      return json{{"block", blk},
                  {"mean_re", mean.real()},
                  {"mean_im", mean.imag()},
                  {"main_re", main.real()},
                  {"main_im", main.imag()},
                  {"dev", std::abs(mean - main)},
                  {"bound", bound}};
    };
    json blocks = json::array();
    blocks.push_back(check("q11", q11, main_11));
    blocks.push_back(check("q21", q21, main_21));
    blocks.push_back(check("q22", q22, main_22));
    blocks.push_back(check("q12", q12, main_12));
    idx_summary.push_back({{"index", i}, {"blocks", blocks}});
  }
  rep.summary = json{{"indices", idx_summary},
                     {"base_slack", base_slack},
                     {"m_kind", cfg.pmpm_m_kind}};
  return rep;
}

// ---------------------------------------------------------------------- esd

ExperimentReport run_esd(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  const double sqd = std::sqrt(static_cast<double>(cfg.d));

  struct Obs {
    girko::DiskMetrics metrics{};
    double perron_gap = 0.0, spectral_radius = 0.0, mu_d_ks = 0.0;
  };
  std::vector<Obs> obs(T);
  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    const auto s = permmat::PermutationSum::sample(cfg.n, cfg.d, rng);
    const Eigen::VectorXcd eigs = spectral::eigenvalues(s);
    // The top eigenvalue is sqrt(d) exactly (constant row sums); remove it.
    Eigen::Index ip = 0;
    double best = 1e300;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
      const double gap = std::abs(eigs[i] - Complex(sqd, 0.0));
      if (gap < best) {
        best = gap;
        ip = i;
      }
    }
    Eigen::VectorXcd rest(eigs.size() - 1);
    Eigen::Index w = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      if (i != ip) rest[w++] = eigs[i];
    Obs& o = obs[t];
    o.perron_gap = best;
    o.metrics = girko::disk_metrics(rest, cfg.epsilon);
    o.spectral_radius = rest.cwiseAbs().maxCoeff();
    if (cfg.mu_d_overlay) {
      // Exploratory: KS of the normalised radii |lambda(S/sqrt(d))| against
      // the fixed-d radial CDF (d-1) r^2 / (d - r^2) on [0, 1] (the law on
      // |z| <= sqrt(d) pushed through the sqrt(d) rescaling).
      std::vector<double> radii(rest.size());
      for (Eigen::Index i = 0; i < rest.size(); ++i) radii[i] = std::abs(rest[i]);
      std::sort(radii.begin(), radii.end());
      const double dd = cfg.d;
      double ks = 0.0;
      for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        const double cdf = std::clamp((dd - 1.0) * r * r / (dd - r * r), 0.0, 1.0);
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / radii.size()));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / radii.size() - cdf));
      }
      o.mu_d_ks = ks;
    }
  });
  rep.streams_used = T;

  double min_inside = 1.0, max_rks = 0.0, max_aks = 0.0, max_pg = 0.0;
  for (std::uint64_t t = 0; t < T; ++t) {
    const Obs& o = obs[t];
    rep.trials.push_back(json{{"trial", t},
                              {"inside_fraction", o.metrics.inside_fraction},
                              {"radial_ks", o.metrics.radial_ks},
                              {"angular_ks", o.metrics.angular_ks},
                              {"perron_gap", o.perron_gap},
                              {"spectral_radius", o.spectral_radius},
                              {"mu_d_radial_ks", o.mu_d_ks}});
    min_inside = std::min(min_inside, o.metrics.inside_fraction);
    max_rks = std::max(max_rks, o.metrics.radial_ks);
    max_aks = std::max(max_aks, o.metrics.angular_ks);
    max_pg = std::max(max_pg, o.perron_gap);
  }
  add_criterion(rep, "min_inside_fraction", min_inside, cfg.inside_min, ">=");
  add_criterion(rep, "max_radial_ks", max_rks, cfg.ks_max, "<=");
  add_criterion(rep, "max_angular_ks", max_aks, cfg.ks_max, "<=");
  add_criterion(rep, "max_perron_gap", max_pg, 1e-8, "<=");
  rep.summary = json{{"min_inside_fraction", min_inside},
                     {"max_radial_ks", max_rks},
                     {"max_angular_ks", max_aks},
                     {"max_perron_gap", max_pg}};
  return rep;
}

// -------------------------------------------------------------------- girko

ExperimentReport run_girko(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  girko::ComplexGrid grid{cfg.grid_center, cfg.grid_half_width, cfg.grid_resolution};
  const double h = grid.spacing();
  const int res = grid.resolution;
  const int threads = resolve_threads(cfg.threads);

  double max_mass_dev = 0.0, max_bump_dev = 0.0, max_repl = 0.0;
  std::uint64_t clipped_total = 0;
  // Trials run serially; the per-node work inside each field is the parallel
  // kernel (one trial with a large grid is the common configuration).
  for (std::uint64_t t = 0; t < T; ++t) {
    RngStream rng(cfg.master_seed, t);
    const auto s = permmat::PermutationSum::sample(cfg.n, cfg.d, rng);
    const Eigen::VectorXcd eigs = spectral::eigenvalues(s);
    const auto field = girko::log_potential_field(s, grid, cfg.clip, threads);
    const auto density = girko::laplacian_density(field);
    const double mass = girko::interior_mass(density);

    double inside = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
      const Complex rel = eigs[i] - grid.center;
      if (std::abs(rel.real()) <= grid.half_width - h &&
          std::abs(rel.imag()) <= grid.half_width - h)
        inside += 1.0;
    }
    inside /= static_cast<double>(eigs.size());

    // Integration-by-parts consistency: the bump average of the spectral
    // measure equals the Laplacian-weighted integral of the log potential.
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      lhs += girko::smooth_bump(eigs[i], cfg.bump_radius);
    lhs /= static_cast<double>(eigs.size());
    double rhs = 0.0;
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k)
        rhs += girko::smooth_bump_laplacian(grid.node(j, k), cfg.bump_radius) * field.values(j, k);
    rhs *= h * h / (2.0 * M_PI);

    std::uint64_t clipped = 0;
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k) clipped += field.clipped(j, k);

    double repl_mean = 0.0;
    if (cfg.replacement) {
      const Eigen::MatrixXcd g = girko::sample_ginibre(cfg.n, rng);
      const Eigen::MatrixXd delta = girko::replacement_compare(s, g, grid, threads);
      double acc = 0.0;
      std::uint64_t cnt = 0;
      for (int j = 0; j < res; ++j)
        for (int k = 0; k < res; ++k)
          if (std::abs(grid.node(j, k)) <= cfg.replacement_radius) {
            acc += std::abs(delta(j, k));
            ++cnt;
          }
      repl_mean = cnt ? acc / static_cast<double>(cnt) : 0.0;
      max_repl = std::max(max_repl, repl_mean);
    }

    const double mass_dev = std::abs(mass - inside);
    const double bump_dev = std::abs(lhs - rhs);
    max_mass_dev = std::max(max_mass_dev, mass_dev);
    max_bump_dev = std::max(max_bump_dev, bump_dev);
    clipped_total += clipped;
    rep.trials.push_back(json{{"trial", t},
                              {"interior_mass", mass},
                              {"eig_fraction_inside", inside},
                              {"mass_dev", mass_dev},
                              {"bump_lhs", lhs},
                              {"bump_rhs", rhs},
                              {"bump_dev", bump_dev},
                              {"clipped_nodes", clipped},
                              {"replacement_mean_abs_delta", repl_mean}});
  }
  rep.streams_used = T;

  add_criterion(rep, "max_mass_dev", max_mass_dev, cfg.mass_tol, "<=");
  add_criterion(rep, "max_bump_dev", max_bump_dev, cfg.bump_tol, "<=");
  if (cfg.replacement)
    add_criterion(rep, "replacement_mean_abs_delta", max_repl, cfg.replacement_tol, "<=");
  rep.summary = json{{"max_mass_dev", max_mass_dev},
                     {"max_bump_dev", max_bump_dev},
                     {"clipped_nodes", clipped_total},
                     {"replacement_max_mean_abs_delta", max_repl}};
  return rep;
}

// ---------------------------------------------------------------- flatcheck

ExperimentReport run_flatcheck(const ExperimentConfig& cfg) {
  ExperimentReport rep = base_report(cfg);
  const std::uint64_t T = cfg.trials;
  const std::uint32_t n = cfg.n;

  struct Obs {
    double rho_hat = 0.0;
    Complex lambda;
    bool nonflat = false, found = false;
    double separation = 0.0, required = 0.0, near_ratio = 0.0;
    std::uint64_t far_size = 0, near_size = 0;
  };
  std::vector<Obs> obs(T);
  parallel_for(static_cast<std::int64_t>(T), resolve_threads(cfg.threads), [&](std::int64_t t) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(t));
    Eigen::VectorXcd u(n);
    if (cfg.probe == "gaussian") {
      for (std::uint32_t i = 0; i < n; ++i) u[i] = rng.complex_normal();
      u.normalize();
    } else {  // two_level: half zeros, half at 2/sqrt(2n), random positions
      const double level = 2.0 / std::sqrt(2.0 * static_cast<double>(n));
      std::vector<std::uint32_t> pos(n);
      std::iota(pos.begin(), pos.end(), 0);
      for (std::uint32_t i = 0; i < n; ++i)
        std::swap(pos[i], pos[i + rng.uniform_below(n - i)]);
      u.setZero();
      for (std::uint32_t i = 0; i < n / 2; ++i) u[pos[i]] = level;
    }
    Obs& o = obs[t];
    const auto fit = flatvec::flat_distance(u, cfg.sparsity);
    o.rho_hat = fit.rho;
    o.lambda = fit.lambda;
    if (fit.rho > cfg.rho) {
      o.nonflat = true;
      const auto loc = flatvec::bimodal_locate(u, cfg.sparsity, cfg.rho);
      o.found = loc.found;
      o.separation = loc.separation;
      o.required = loc.required;
      o.near_ratio = loc.near_ratio;
      o.far_size = loc.far.size();
      o.near_size = loc.near.size();
    }
  });
  rep.streams_used = T;

  std::uint64_t nonflat = 0, located = 0;
  double min_sep_ratio = 1e300;
  std::vector<double> rhos;
  for (std::uint64_t t = 0; t < T; ++t) {
    const Obs& o = obs[t];
    rep.trials.push_back(json{{"trial", t},
                              {"rho_hat", o.rho_hat},
                              {"lambda_re", o.lambda.real()},
                              {"lambda_im", o.lambda.imag()},
                              {"nonflat", o.nonflat},
                              {"found", o.found},
                              {"far_size", o.far_size},
                              {"near_size", o.near_size},
                              {"separation", o.separation},
                              {"required", o.required},
                              {"near_ratio", o.near_ratio}});
    rhos.push_back(o.rho_hat);
    if (o.nonflat) {
      ++nonflat;
      if (o.found) {
        ++located;
        if (o.required > 0.0) min_sep_ratio = std::min(min_sep_ratio, o.separation / o.required);
      }
    }
  }
  const double locate_rate =
      nonflat == 0 ? 1.0 : static_cast<double>(located) / static_cast<double>(nonflat);
  add_criterion(rep, "locate_rate_on_nonflat", locate_rate, 1.0, ">=");
  add_criterion(rep, "min_separation_ratio", min_sep_ratio >= 1e300 ? 1.0 : min_sep_ratio, 1.0,
                ">=");
  rep.summary = json{{"mean_rho_hat", mean_d(rhos)},
                     {"nonflat_trials", nonflat},
                     {"located_trials", located}};
  return rep;
}

// ----------------------------------------------------------------- dispatch

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto v = cfg.validate();
  if (!v.ok()) throw std::invalid_argument("config: " + v.joined());
  Eigen::setNbThreads(1);  // our OpenMP loops are the only parallelism

  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (cfg.kind == "traces")
    rep = run_traces(cfg);
  else if (cfg.kind == "locallaw")
    rep = run_locallaw(cfg);
  else if (cfg.kind == "loopres")
    rep = run_loopres(cfg);
  else if (cfg.kind == "ssv")
    rep = run_ssv(cfg);
  else if (cfg.kind == "noholes")
    rep = run_noholes(cfg);
  else if (cfg.kind == "concentration")
    rep = run_concentration(cfg);
  else if (cfg.kind == "smallball")
    rep = run_smallball(cfg);
  else if (cfg.kind == "pmpm")
    rep = run_pmpm(cfg);
  else if (cfg.kind == "esd")
    rep = run_esd(cfg);
  else if (cfg.kind == "girko")
    rep = run_girko(cfg);
  else if (cfg.kind == "flatcheck")
    rep = run_flatcheck(cfg);
  else
    throw std::invalid_argument("run_experiment: unknown kind " + cfg.kind);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace permlaw::runners
