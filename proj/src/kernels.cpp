#include "tsabc/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsabc {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// --- simulate_block ----------------------------------------------------------

SimBlock simulate_block_serial(const BoundLaw& law, const ObservationSeries& y,
                               const AbcKernel& kernel, bool early_reject,
                               const RngStream& block) {
  const std::size_t n = law.size();
  SimBlock out;
  out.u.assign(n, 0.0);
  out.all_hit = true;
  out.first_miss = n;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng = block.substream(i);
    out.u[i] = law.simulate(i, rng);
    if (!kernel.hit1(out.u[i], y.scalar(i))) {
      out.all_hit = false;
      out.first_miss = i;
      if (early_reject) break;
    }
  }
  return out;
}

SimBlock simulate_block_omp(const BoundLaw& law, const ObservationSeries& y,
                            const AbcKernel& kernel, const RngStream& block, int threads) {
  const std::size_t n = law.size();
  SimBlock out;
  out.u.assign(n, 0.0);
  std::vector<std::uint8_t> hit(n, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    RngStream rng = block.substream(static_cast<std::uint64_t>(i));
    const auto idx = static_cast<std::size_t>(i);
    out.u[idx] = law.simulate(idx, rng);
    hit[idx] = kernel.hit1(out.u[idx], y.scalar(idx)) ? 1 : 0;
  }
  out.all_hit = true;
  out.first_miss = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!hit[i]) {
      out.all_hit = false;
      out.first_miss = i;
      break;
    }
  }
  (void)threads;
  return out;
}

SimBlock simulate_block(const BoundLaw& law, const ObservationSeries& y, const AbcKernel& kernel,
                        bool early_reject, const RngStream& block, int threads) {
  const int t = resolve_threads(threads);
  if (t <= 1) return simulate_block_serial(law, y, kernel, early_reject, block);
  return simulate_block_omp(law, y, kernel, block, t);
}

// --- count_hits ---------------------------------------------------------------

namespace {
std::uint32_t count_hits_one(const BoundLaw& law, double yi, const AbcKernel& kernel,
                             std::uint32_t n_trials, RngStream rng, std::size_t i) {
  std::uint32_t hits = 0;
  for (std::uint32_t j = 0; j < n_trials; ++j)
    if (kernel.hit1(law.simulate(i, rng), yi)) ++hits;
  return hits;
}
}  // namespace

std::vector<std::uint32_t> count_hits_serial(const BoundLaw& law, const ObservationSeries& y,
                                             const AbcKernel& kernel, std::uint32_t n_trials,
                                             const RngStream& block) {
  const std::size_t n = law.size();
  std::vector<std::uint32_t> counts(n);
  for (std::size_t i = 0; i < n; ++i)
    counts[i] = count_hits_one(law, y.scalar(i), kernel, n_trials, block.substream(i), i);
  return counts;
}

std::vector<std::uint32_t> count_hits_omp(const BoundLaw& law, const ObservationSeries& y,
                                          const AbcKernel& kernel, std::uint32_t n_trials,
                                          const RngStream& block, int threads) {
  const std::size_t n = law.size();
  std::vector<std::uint32_t> counts(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    counts[idx] = count_hits_one(law, y.scalar(idx), kernel, n_trials,
                                 block.substream(static_cast<std::uint64_t>(i)), idx);
  }
  (void)threads;
  return counts;
}

std::vector<std::uint32_t> count_hits(const BoundLaw& law, const ObservationSeries& y,
                                      const AbcKernel& kernel, std::uint32_t n_trials,
                                      const RngStream& block, int threads) {
  const int t = resolve_threads(threads);
  if (t <= 1) return count_hits_serial(law, y, kernel, n_trials, block);
  return count_hits_omp(law, y, kernel, n_trials, block, t);
}

// --- trials_until_hits ----------------------------------------------------------

namespace {
// Attempts until n_hits hits, bounded by cap. Returns attempts (including the
// final success); -1 when the cap ran out first.
long long trials_one(const BoundLaw& law, double yi, const AbcKernel& kernel,
                     std::uint32_t n_hits, long long cap, RngStream rng, std::size_t i) {
  std::uint32_t hits = 0;
  long long attempts = 0;
  while (attempts < cap) {
    ++attempts;
    if (kernel.hit1(law.simulate(i, rng), yi)) {
      if (++hits == n_hits) return attempts;
    }
  }
  return -1;
}
}  // namespace

TrialCounts trials_until_hits_serial(const BoundLaw& law, const ObservationSeries& y,
                                     const AbcKernel& kernel, std::uint32_t n_hits, long long cap,
                                     const RngStream& block) {
  const std::size_t n = law.size();
  TrialCounts out;
  out.m.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const long long m = trials_one(law, y.scalar(i), kernel, n_hits, cap, block.substream(i), i);
    if (m < 0) {
      out.capped = true;
      out.capped_at = i;
      return out;
    }
    out.m[i] = m;
  }
  return out;
}

TrialCounts trials_until_hits_omp(const BoundLaw& law, const ObservationSeries& y,
                                  const AbcKernel& kernel, std::uint32_t n_hits, long long cap,
                                  const RngStream& block, int threads) {
  const std::size_t n = law.size();
  TrialCounts out;
  out.m.assign(n, 0);
  std::atomic<long long> capped_at{-1};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    if (capped_at.load(std::memory_order_relaxed) >= 0) continue;  // block is doomed, skip
    const auto idx = static_cast<std::size_t>(i);
    const long long m = trials_one(law, y.scalar(idx), kernel, n_hits, cap,
                                   block.substream(static_cast<std::uint64_t>(i)), idx);
    if (m < 0) {
      long long expected = -1;
      capped_at.compare_exchange_strong(expected, static_cast<long long>(i));
    } else {
      out.m[idx] = m;
    }
  }
  if (capped_at.load() >= 0) {
    out.capped = true;
    out.capped_at = static_cast<std::size_t>(capped_at.load());
  }
  (void)threads;
  return out;
}

TrialCounts trials_until_hits(const BoundLaw& law, const ObservationSeries& y,
                              const AbcKernel& kernel, std::uint32_t n_hits, long long cap,
                              const RngStream& block, int threads) {
  const int t = resolve_threads(threads);
  if (t <= 1) return trials_until_hits_serial(law, y, kernel, n_hits, cap, block);
  return trials_until_hits_omp(law, y, kernel, n_hits, cap, block, t);
}

// --- noise_refresh ----------------------------------------------------------------

namespace {
bool noise_refresh_one(const BoundLaw& law, double yi, const AbcKernel& kernel, double& phi,
                       RngStream rng, std::size_t i) {
  const double proposed = law.sample_noise(i, rng);
  if (kernel.hit1(law.obs_from_noise(i, proposed), yi)) {
    phi = proposed;
    return true;
  }
  return false;
}
}  // namespace

std::size_t noise_refresh_serial(const BoundLaw& law, const ObservationSeries& y,
                                 const AbcKernel& kernel, std::vector<double>& phi,
                                 const RngStream& block) {
  std::size_t moved = 0;
  for (std::size_t i = 0; i < law.size(); ++i)
    if (noise_refresh_one(law, y.scalar(i), kernel, phi[i], block.substream(i), i)) ++moved;
  return moved;
}

std::size_t noise_refresh_omp(const BoundLaw& law, const ObservationSeries& y,
                              const AbcKernel& kernel, std::vector<double>& phi,
                              const RngStream& block, int threads) {
  const std::size_t n = law.size();
  std::size_t moved = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) reduction(+ : moved)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (noise_refresh_one(law, y.scalar(idx), kernel, phi[idx],
                          block.substream(static_cast<std::uint64_t>(i)), idx))
      ++moved;
  }
  (void)threads;
  return moved;
}

std::size_t noise_refresh(const BoundLaw& law, const ObservationSeries& y,
                          const AbcKernel& kernel, std::vector<double>& phi,
                          const RngStream& block, int threads) {
  const int t = resolve_threads(threads);
  if (t <= 1) return noise_refresh_serial(law, y, kernel, phi, block);
  return noise_refresh_omp(law, y, kernel, phi, block, t);
}

}  // namespace tsabc
