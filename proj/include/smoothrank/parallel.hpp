#pragma once

namespace smoothrank {

/// Selects between the OpenMP kernels and the serial reference loops.
/// Both paths run the same per-element arithmetic, so results are bit-identical.
enum class Execution { serial, parallel };

/// Number of OpenMP threads that a parallel region would use.
int max_threads();

/// Sets the OpenMP thread count for subsequent parallel regions (n >= 1).
void set_threads(int n);

}  // namespace smoothrank
