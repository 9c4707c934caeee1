#include "smoothrank/parallel.hpp"

#include <omp.h>

namespace smoothrank {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) { omp_set_num_threads(n < 1 ? 1 : n); }

}  // namespace smoothrank
