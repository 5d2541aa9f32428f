// Benchmark comparing the serial reference kernels against their OpenMP
// counterparts on representative workloads, verifying along the way that both
// produce identical results (every work item owns a keyed substream).

#include <chrono>
#include <cstdio>
#include <string>

#include "tsabc/kernels.hpp"
#include "tsabc/mcmc.hpp"
#include "tsabc/smc.hpp"

using namespace tsabc;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

void report(const std::string& name, double serial, double parallel, bool equal) {
  std::printf("%-28s serial %8.4f s   omp %8.4f s   speedup %5.2fx   results %s\n", name.c_str(),
              serial, parallel, serial / parallel, equal ? "identical" : "DIFFER");
}

}  // namespace

int main() {
  const int threads = resolve_threads(0);
  std::printf("threads available: %d\n", threads);

  NormalLocationModel model;
  RngStream data_rng(7);
  const auto data = model.simulate(model.params_from_values({0.0}), 400, data_rng).obs;
  const auto law = model.make_law(data);
  const auto theta = model.params_from_values({0.1});
  const auto bound = law->bind(theta);
  const AbcKernel kernel(1.0, 1);
  const RngStream block = RngStream(11).substream(5);

  {
    std::vector<std::uint32_t> a, b;
    const double ts = time_best_of(3, [&] { a = count_hits_serial(*bound, data, kernel, 400, block); });
    const double tp = time_best_of(3, [&] {
      b = count_hits_omp(*bound, data, kernel, 400, block, threads);
    });
    report("count_hits (n=400, N=400)", ts, tp, a == b);
  }
  {
    TrialCounts a, b;
    const double ts = time_best_of(
        3, [&] { a = trials_until_hits_serial(*bound, data, kernel, 64, 1'000'000, block); });
    const double tp = time_best_of(3, [&] {
      b = trials_until_hits_omp(*bound, data, kernel, 64, 1'000'000, block, threads);
    });
    report("trials_until_hits (N=64)", ts, tp, a.m == b.m && a.capped == b.capped);
  }
  {
    SvModel sv;
    const auto sv_theta = sv.default_params();
    RngStream sv_data_rng(21);
    const auto y = sv.simulate(sv_theta, 200, sv_data_rng).obs;
    FilterOptions opts;
    opts.particles = 512;
    opts.kernel = AbcKernel(2.0, 1);
    FilterResult a, b;
    opts.threads = 1;
    const double ts = time_best_of(3, [&] {
      RngStream rng(31);
      a = smc_abc_filter(sv, sv_theta, y, opts, rng);
    });
    opts.threads = threads;
    const double tp = time_best_of(3, [&] {
      RngStream rng(31);
      b = smc_abc_filter(sv, sv_theta, y, opts, rng);
    });
    report("smc_abc_filter (N=512)", ts, tp,
           a.nc.log_value == b.nc.log_value && a.particles.x == b.particles.x);

    opts.threads = 1;
    const double tsa = time_best_of(3, [&] {
      RngStream rng(37);
      a = alive_smc_filter(sv, sv_theta, y, opts, rng);
    });
    opts.threads = threads;
    const double tpa = time_best_of(3, [&] {
      RngStream rng(37);
      b = alive_smc_filter(sv, sv_theta, y, opts, rng);
    });
    report("alive_smc_filter (N=512)", tsa, tpa,
           a.nc.log_value == b.nc.log_value && a.nc.trial_counts == b.nc.trial_counts);
  }
  return 0;
}
