#pragma once

#include <cstddef>

namespace hyperlearn::kernels {

// Row operations used by the robustness DP (double) and the MLP (float).
// Every variant must agree bit-for-bit with the scalar reference on the row
// ops; the float reductions may differ by summation order only.
struct KernelTable {
  const char* name;

  void (*neg)(const double* a, double* out, std::size_t n);
  void (*min)(const double* a, const double* b, double* out, std::size_t n);
  void (*max)(const double* a, const double* b, double* out, std::size_t n);
  // out = max(-a, b), the material implication
  void (*implies)(const double* a, const double* b, double* out, std::size_t n);
  void (*clamp)(const double* a, double lo, double hi, double* out, std::size_t n);

  float (*dot)(const float* a, const float* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // y = W x + b with W row-major rows x cols
  void (*gemv)(const float* w, const float* x, const float* b, float* y, std::size_t rows, std::size_t cols);
  void (*relu)(float* x, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Chosen once: AVX2 when available unless HYPERLEARN_KERNELS=scalar.
const KernelTable& active();

}  // namespace hyperlearn::kernels
