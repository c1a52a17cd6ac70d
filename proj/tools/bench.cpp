// Benchmark: OpenMP kernels against the serial reference implementation.
// Verifies bit-identical results, then reports wall times and speedup for
// (a) the log-potential field kernel and (b) a Monte Carlo trial batch.

#include <chrono>
#include <complex>
#include <cstdint>
#include <iostream>

#include <omp.h>

#include "permlaw/config.hpp"
#include "permlaw/girko.hpp"
#include "permlaw/parallel.hpp"
#include "permlaw/permmat.hpp"
#include "permlaw/report.hpp"
#include "permlaw/rng.hpp"
#include "permlaw/runners.hpp"

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace permlaw;
  std::uint32_t n = 80;
  int resolution = 61;
  std::uint64_t trials = 24;
  if (argc > 1) n = static_cast<std::uint32_t>(std::stoul(argv[1]));
  if (argc > 2) resolution = std::stoi(argv[2]);
  if (argc > 3) trials = std::stoull(argv[3]);
  const int threads = omp_get_max_threads();
  std::cout << "threads available: " << threads << "\n";

  // (a) log-potential field: one matrix, resolution^2 singular value solves.
  {
    RngStream rng(7, 0);
    const auto s = permmat::PermutationSum::sample(n, 4, rng);
    const girko::ComplexGrid grid{std::complex<double>(0.0, 0.0), 1.5, resolution};

    double t0 = now_seconds();
    const auto serial = girko::log_potential_field_serial(s, grid, 1e-30);
    const double t_serial = now_seconds() - t0;

    t0 = now_seconds();
    const auto parallel = girko::log_potential_field(s, grid, 1e-30, threads);
    const double t_parallel = now_seconds() - t0;

    const double diff = (serial.values - parallel.values).cwiseAbs().maxCoeff();
    std::cout << "log_potential_field  n=" << n << " grid=" << resolution << "x" << resolution
              << "\n  serial   " << t_serial << " s\n  parallel " << t_parallel << " s  ("
              << threads << " threads, speedup " << t_serial / t_parallel << "x)\n"
              << "  max |serial - parallel| = " << diff << (diff == 0.0 ? "  (identical)" : "")
              << "\n";
  }

  // (b) trial batch: the loop-residual experiment end to end.
  {
    config::ExperimentConfig cfg;
    cfg.kind = "loopres";
    cfg.n = n;
    cfg.d = 4;
    cfg.z = std::complex<double>(0.3, 0.2);
    cfg.eta_grid = {0.5, 1.0};
    cfg.trials = trials;
    cfg.master_seed = 7;

    cfg.threads = 1;
    double t0 = now_seconds();
    const auto rep_serial = runners::run_experiment(cfg);
    const double t_serial = now_seconds() - t0;

    cfg.threads = threads;
    t0 = now_seconds();
    const auto rep_parallel = runners::run_experiment(cfg);
    const double t_parallel = now_seconds() - t0;

    const bool identical = report::to_json(rep_serial) == report::to_json(rep_parallel);
    std::cout << "trial batch  kind=loopres  n=" << n << " trials=" << trials
              << "\n  serial   " << t_serial << " s\n  parallel " << t_parallel << " s  ("
              << threads << " threads, speedup " << t_serial / t_parallel << "x)\n"
              << "  reports byte-identical: " << (identical ? "yes" : "NO") << "\n";
    if (!identical) return 1;
  }
  return 0;
}
