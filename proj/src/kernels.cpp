#include "himo/kernels.hpp"

namespace himo::kernels {

namespace detail {

#if defined(__x86_64__)
bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

namespace {

const Dispatch* select_default() {
#if defined(__x86_64__)
  if (avx2_supported()) return &kAvx2;
#endif
  return &kScalar;
}

const Dispatch* g_active = select_default();

}  // namespace
}  // namespace detail

std::string_view active_backend() {
#if defined(__x86_64__)
  if (detail::g_active == &detail::kAvx2) return "avx2";
#endif
  return "scalar";
}

bool set_backend(std::string_view name) {
  if (name == "scalar") {
    detail::g_active = &detail::kScalar;
    return true;
  }
#if defined(__x86_64__)
  if (name == "avx2" && detail::avx2_supported()) {
    detail::g_active = &detail::kAvx2;
    return true;
  }
#endif
  return false;
}

double dot(const double* a, const double* b, std::size_t n) {
  return detail::g_active->dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  detail::g_active->axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  detail::g_active->scale(alpha, x, n);
}

double sum(const double* x, std::size_t n) { return detail::g_active->sum(x, n); }

double squared_norm(const double* x, std::size_t n) {
  return detail::g_active->squared_norm(x, n);
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  detail::g_active->subtract(a, b, out, n);
}

}  // namespace himo::kernels
