#include "hyperlearn/kernels.hpp"

// Reference implementations. min/max follow the x86 MINPD/MAXPD rule
// (first operand only when strictly smaller/larger) so the vector variants
// can match them bit-for-bit, signed zeros included.

namespace hyperlearn::kernels {

namespace {

inline double pick_min(double a, double b) { return a < b ? a : b; }
inline double pick_max(double a, double b) { return a > b ? a : b; }

void neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}

void vmin(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = pick_min(a[i], b[i]);
}

void vmax(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = pick_max(a[i], b[i]);
}

void implies(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = pick_max(-a[i], b[i]);
}

void clamp(const double* a, double lo, double hi, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = pick_min(pick_max(a[i], lo), hi);
}

float dot(const float* a, const float* b, std::size_t n) {
  float s = 0.0f;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const float* w, const float* x, const float* b, float* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = b[r] + dot(w + r * cols, x, cols);
}

void relu(float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{"scalar", neg, vmin, vmax, implies, clamp, dot, axpy, gemv, relu};
  return t;
}

}  // namespace hyperlearn::kernels
