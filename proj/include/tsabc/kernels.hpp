#pragma once

#include <cstdint>
#include <vector>

#include "tsabc/abc.hpp"
#include "tsabc/models.hpp"
#include "tsabc/rng.hpp"
#include "tsabc/types.hpp"

namespace tsabc {

// Batch simulation kernels shared by the MCMC samplers. Each kernel exists in
// a serial reference version and an OpenMP version; datum i always draws from
// block.substream(i), so the two produce identical output and the parallel
// schedule cannot change any result. The *_serial variants are kept as the
// reference the tests and the benchmark compare against.
//
// `threads` convention for the dispatching overloads: 1 runs the serial
// reference, 0 picks the OpenMP default thread count, anything else is an
// explicit thread count.

int resolve_threads(int threads);

// One auxiliary draw per datum plus its hit indicator (the basic ABC-MCMC
// proposal body). With early_reject the serial path stops at the first miss;
// the result is the same either way because later data never influence the
// decision, only `u` entries past the miss stay unset.
struct SimBlock {
  std::vector<double> u;
  bool all_hit = false;
  std::size_t first_miss = 0;  // == n when all_hit
};

SimBlock simulate_block_serial(const BoundLaw& law, const ObservationSeries& y,
                               const AbcKernel& kernel, bool early_reject,
                               const RngStream& block);
SimBlock simulate_block_omp(const BoundLaw& law, const ObservationSeries& y,
                            const AbcKernel& kernel, const RngStream& block, int threads);
SimBlock simulate_block(const BoundLaw& law, const ObservationSeries& y, const AbcKernel& kernel,
                        bool early_reject, const RngStream& block, int threads);

// Per-datum hit counts out of n_trials auxiliary draws (the N-trials proposal
// body).
std::vector<std::uint32_t> count_hits_serial(const BoundLaw& law, const ObservationSeries& y,
                                             const AbcKernel& kernel, std::uint32_t n_trials,
                                             const RngStream& block);
std::vector<std::uint32_t> count_hits_omp(const BoundLaw& law, const ObservationSeries& y,
                                          const AbcKernel& kernel, std::uint32_t n_trials,
                                          const RngStream& block, int threads);
std::vector<std::uint32_t> count_hits(const BoundLaw& law, const ObservationSeries& y,
                                      const AbcKernel& kernel, std::uint32_t n_trials,
                                      const RngStream& block, int threads);

// Per-datum trial counts until n_hits hits (the random-number-of-trials
// proposal body), each datum bounded by `cap` attempts. When a datum exhausts
// its cap the whole block is flagged; a capped block is always rejected by
// the caller, so only the `capped` flag is contractual there (the OpenMP path
// may skip remaining data once a cap event is seen, `capped_at` is a
// diagnostic hint).
struct TrialCounts {
  std::vector<long long> m;
  bool capped = false;
  std::size_t capped_at = 0;
};

TrialCounts trials_until_hits_serial(const BoundLaw& law, const ObservationSeries& y,
                                     const AbcKernel& kernel, std::uint32_t n_hits, long long cap,
                                     const RngStream& block);
TrialCounts trials_until_hits_omp(const BoundLaw& law, const ObservationSeries& y,
                                  const AbcKernel& kernel, std::uint32_t n_hits, long long cap,
                                  const RngStream& block, int threads);
TrialCounts trials_until_hits(const BoundLaw& law, const ObservationSeries& y,
                              const AbcKernel& kernel, std::uint32_t n_hits, long long cap,
                              const RngStream& block, int threads);

// Per-datum independence refresh of the collapsed noise coordinates: propose
// phi_i' from the noise law and keep it iff the induced observation hits the
// ball (the noise-density factors cancel exactly for this proposal). Returns
// the number of coordinates that moved.
std::size_t noise_refresh_serial(const BoundLaw& law, const ObservationSeries& y,
                                 const AbcKernel& kernel, std::vector<double>& phi,
                                 const RngStream& block);
std::size_t noise_refresh_omp(const BoundLaw& law, const ObservationSeries& y,
                              const AbcKernel& kernel, std::vector<double>& phi,
                              const RngStream& block, int threads);
std::size_t noise_refresh(const BoundLaw& law, const ObservationSeries& y,
                          const AbcKernel& kernel, std::vector<double>& phi,
                          const RngStream& block, int threads);

}  // namespace tsabc
