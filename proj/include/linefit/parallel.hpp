#pragma once

namespace linefit {

/// Thread budget for the OpenMP kernels: min(omp_get_max_threads(),
/// LINEFIT_THREADS) when the env var is set to a positive integer,
/// otherwise omp_get_max_threads(). 1 in serial builds.
int effective_threads();

/// Applies the LINEFIT_THREADS cap process-wide. No-op in serial builds.
void apply_thread_cap();

}  // namespace linefit
