#pragma once

// Closed-form absolute orientation in arbitrary dimension.
//
// Conventions: `target` is the fixed embedding A, `source` is the embedding B
// being moved onto it. Rows are vectors and maps act on the right, so an
// aligned source row is b_i·R. Rows of the two inputs must correspond.

#include <cstddef>
#include <string>
#include <vector>

#include "embalign/embedding.hpp"
#include "embalign/matrix.hpp"

namespace embalign {

/// Learned alignment x ↦ scale·(x − source_mean)·rotation + target_mean.
struct Transform {
  Matrix rotation;
  double scale = 1.0;
  std::vector<double> source_mean;
  std::vector<double> target_mean;

  bool centered = false;
  bool scaled = false;
  bool proper = false;
  bool fit_normalized = false;

  /// Singular values of the cross-covariance the rotation came from.
  std::vector<double> singular_values;
  std::vector<std::string> warnings;

  std::size_t dim() const noexcept { return rotation.rows(); }

  static Transform identity(std::size_t d);
};

struct FitOptions {
  /// Force det(R) = +1. Off by default: the fit ranges over all orthogonal
  /// matrices, reflections included.
  bool proper = false;
  /// Fit on row-normalized copies of both inputs (maximizes summed cosine).
  bool normalize = false;
};

/// Fitted transform plus the transformed source rows.
struct RotationFit {
  Transform transform;
  Embedding aligned;
};

/// Centered variants also return the centered target Â.
struct CenteredFit {
  Transform transform;
  Embedding target_centered;
  Embedding aligned;
};

/// H = Σ_i b_iᵀ a_i (d×d).
Matrix cross_covariance(const Embedding& target, const Embedding& source);

/// Rotation about the origin minimizing Σ‖a_i − b_i·R‖².
RotationFit ao_rotation(const Embedding& target, const Embedding& source,
                        const FitOptions& options = {});

/// Centers both inputs, then ao_rotation. The transform has
/// source_mean = b̄ and target_mean = 0; `aligned` is B̂·R.
CenteredFit ao_centered(const Embedding& target, const Embedding& source,
                        const FitOptions& options = {});

/// ao_centered followed by translation back to the target's mean
/// (target_mean = ā), so aligned rows are (b_i − b̄)·R + ā.
RotationFit absolute_orientation(const Embedding& target, const Embedding& source,
                                 const FitOptions& options = {});

/// s* = Σ⟨a_i, b_i⟩ / ‖B‖_F², the least-squares scale of already-rotated rows.
/// Throws NumericError("degenerate source norm") when B is all zero and when
/// the optimum is not positive.
double optimal_scale(const Embedding& target, const Embedding& source_rotated);

/// ao_rotation, then optimal_scale on the rotated rows.
RotationFit ao_scaling(const Embedding& target, const Embedding& source,
                       const FitOptions& options = {});

/// Center, rotate, scale.
CenteredFit ao_centered_scaling(const Embedding& target, const Embedding& source,
                                const FitOptions& options = {});

/// Every row scaled to unit Euclidean norm. Zero rows are an error that
/// lists the offending words.
Embedding normalize_rows(const Embedding& e);

/// Rows minus their column mean; writes the mean to `mean` when given.
Embedding center_rows(const Embedding& e, std::vector<double>* mean = nullptr);

/// Applies `t` to every row; works for words outside the fitted correspondence.
Embedding apply_transform(const Embedding& e, const Transform& t);

}  // namespace embalign
