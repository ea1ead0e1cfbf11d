#pragma once

#include <cstddef>
#include <string_view>

namespace battlemix::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Inner-loop kernels used by the mixture engine. Every variant computes the
/// same quantities; vector variants may differ from the scalar reference in
/// the last bits because they reassociate the sums.
struct Kernels {
  Isa isa;
  /// Σ a[i]·b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// Σ (a[i] − b[i])²
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  /// Σ w[i]·(a[i] − b[i])²
  double (*weighted_sq_dist)(const double* a, const double* b, const double* w, std::size_t n);
  /// y[i] += alpha·x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Σ w[i]·a[i]·b[i]
  double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
  /// y[i] += alpha·(x[i] − shift)²
  void (*shifted_sq_acc)(double alpha, const double* x, double shift, double* y, std::size_t n);
};

const Kernels& scalar_kernels();

/// True when this build contains the variant and the running CPU supports it.
bool isa_available(Isa isa);

/// Kernels for a specific variant; throws InvalidArgument when unavailable.
const Kernels& kernels_for(Isa isa);

/// The active table. Defaults to the best available variant; the environment
/// variable BATTLEMIX_KERNELS=scalar pins the reference path.
const Kernels& kernels();

/// Overrides the active table (tests and benchmarks).
void force_isa(Isa isa);

}  // namespace battlemix::simd
