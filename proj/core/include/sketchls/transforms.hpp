#pragma once

#include "sketchls/linalg.hpp"

namespace sketchls {

/// Normalized fast Walsh-Hadamard transform, H_ij = n^{-1/2} (-1)^{<i,j>_2}.
/// In place, O(n log n); an involution and an isometry. Length must be a
/// power of two (NotPowerOfTwo otherwise).
void fwht_normalized_inplace(Vector& v);
Vector fwht_normalized(const Vector& v);

/// Column-wise in-place normalized FWHT; rows must be a power of two.
void fwht_normalized_columns_inplace(Matrix& a);

/// Real part of the unitary DFT: out_k = n^{-1/2} sum_j cos(2 pi k j / n) v_j.
/// O(n log n) for any n (FFTW backend). Input must be finite and nonempty.
Vector real_dft(const Vector& v);

/// Orthonormal real Fourier transform R v, where R has rows
///   k = 0:                 n^{-1/2} (1, ..., 1)
///   1 <= k < ceil(n/2):    sqrt(2/n) cos(2 pi k j / n)
///   k = n/2 (n even):      n^{-1/2} (-1)^j
///   n/2 < k < n:           sqrt(2/n) sin(2 pi (n-k) j / n)
/// R is orthogonal (R R^T = I), computed from one real FFT per column.
/// This is the sketching basis behind the SRFT operator.
void real_fourier_orthonormal_columns_inplace(Matrix& a);
Vector real_fourier_orthonormal(const Vector& v);

} // namespace sketchls
