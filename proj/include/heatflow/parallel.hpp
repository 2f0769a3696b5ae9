#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace heatflow {

/// How a kernel runs its independent per-index work: the serial loop is the
/// reference; the OpenMP loop must produce bit-identical results.
struct Execution {
  bool parallel = true;
  int jobs = 0;  // 0: OpenMP default

  static Execution serial() { return {false, 1}; }
  static Execution openmp(int jobs = 0) { return {true, jobs}; }
};

/// Runs body(i) for i in [0, count). Exceptions are captured per index and
/// returned; nothing escapes the parallel region.
template <class Body>
std::vector<std::exception_ptr> try_for_each_index(std::size_t count,
                                                   const Execution& exec,
                                                   Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  const long n = static_cast<long>(count);
  if (!exec.parallel) {
    for (long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    return errors;
  }
  auto run = [&](long i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (exec.jobs > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(exec.jobs)
    for (long i = 0; i < n; ++i) run(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) run(i);
  }
  return errors;
}

/// As try_for_each_index, rethrowing the failure with the lowest index.
template <class Body>
void for_each_index(std::size_t count, const Execution& exec, Body&& body) {
  for (const auto& e : try_for_each_index(count, exec, body)) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace heatflow
