#pragma once

#include <cstddef>
#include <cstdint>

namespace msm {

/// Serial is the reference path kept for testing; Parallel farms the same
/// per-cell bodies out to OpenMP threads. Both must give bitwise-identical
/// results: bodies write disjoint cells and reductions stay serial.
enum class Execution { Serial, Parallel };

template <class Body>
void for_each_index(Execution exec, std::size_t n, Body&& body) {
  if (exec == Execution::Parallel) {
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      body(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace msm
