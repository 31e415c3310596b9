#pragma once

// Execution policy shared by the data-parallel kernels. Every kernel keeps a
// plain serial loop as its reference path; the OpenMP path evaluates the same
// per-item body, so both produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace lrdn {

enum class Exec { Serial, Parallel };

/// Runs body(i) for i in [0, n). Exceptions thrown by any item are collected
/// and the one from the lowest index is rethrown after the loop, so the
/// observable failure does not depend on scheduling.
template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace lrdn
