#pragma once

namespace chainforge {

/// Worker count for the OpenMP kernels. Honors CHAINFORGE_THREADS when set
/// to a positive integer, otherwise the OpenMP default.
int thread_count();

/// Applies thread_count() to the OpenMP runtime.
void configure_threads();

}  // namespace chainforge
