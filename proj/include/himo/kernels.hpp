#pragma once

#include <cstddef>
#include <string_view>

// Double-precision vector kernels used by every arithmetic inner loop.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is selected at runtime when the CPU supports it. Both variants
// are equivalence-tested against each other.

namespace himo::kernels {

// Name of the implementation in use: "scalar" or "avx2".
std::string_view active_backend();

// Force a backend ("scalar" or "avx2"); returns false if unavailable.
// Intended for tests; not thread-safe against concurrent kernel calls.
bool set_backend(std::string_view name);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x[i] *= alpha
void scale(double alpha, double* x, std::size_t n);

// sum_i x[i]
double sum(const double* x, std::size_t n);

// sum_i x[i]^2
double squared_norm(const double* x, std::size_t n);

// out[i] = a[i] - b[i]
void subtract(const double* a, const double* b, double* out, std::size_t n);

namespace detail {

struct Dispatch {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*squared_norm)(const double*, std::size_t);
  void (*subtract)(const double*, const double*, double*, std::size_t);
};

extern const Dispatch kScalar;
#if defined(__x86_64__)
extern const Dispatch kAvx2;
bool avx2_supported();
#endif

}  // namespace detail

}  // namespace himo::kernels
