#pragma once

#include <vector>

#include "embalign/matrix.hpp"

namespace embalign {

/// Full SVD of a square matrix: input = u · diag(singular_values) · v_t.
struct SvdResult {
  Matrix u;
  std::vector<double> singular_values;  // nonincreasing, all ≥ 0
  Matrix v_t;
  int sweeps = 0;
};

struct SvdOptions {
  /// Off-diagonal stopping threshold: a column pair is orthogonal once
  /// |⟨w_p, w_q⟩| ≤ tolerance·‖w_p‖·‖w_q‖.
  double tolerance = 1e-14;
  /// Sweep cap; 0 means 100·d².
  long max_sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD of a d×d matrix.
///
/// Columns whose singular value vanishes are completed to an orthonormal
/// basis, so u is always orthogonal. Deterministic for a fixed input.
/// Throws NumericError on non-square or non-finite input and when the sweep
/// cap is reached.
SvdResult svd_small(const Matrix& h, const SvdOptions& options = {});

/// R = U·Vᵀ, or U·I₋·Vᵀ when `proper` is set and det(U·Vᵀ) < 0.
Matrix rotation_from_svd(const SvdResult& svd, bool proper);

}  // namespace embalign
