#pragma once

namespace lupasq {

/// Execution policy for the grid-sweep kernels. Every parallel kernel
/// reduces with max/min only, so results are bit-identical to the serial
/// reference at any thread count.
enum class Exec { Serial, Parallel };

/// Worker-count control for the parallel kernels (OpenMP under the hood;
/// a no-op in builds without it). n <= 0 restores the default.
void set_threads(int n);
int max_threads();

} // namespace lupasq
