#ifndef SFHD_PARALLEL_HPP
#define SFHD_PARALLEL_HPP

namespace sfhd {

/// Number of threads batch loops may use. Defaults to hardware concurrency,
/// capped by the SFHD_THREADS environment variable when set.
int thread_count();

/// Override the thread cap programmatically (n >= 1). Used by the CLI and by
/// the determinism tests; results must not depend on this value.
void set_thread_count(int n);

} // namespace sfhd

#endif
