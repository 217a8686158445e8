#pragma once

#include <optional>
#include <string>
#include <vector>

#include "embalign/embedding.hpp"
#include "embalign/matrix.hpp"

namespace embalign {

/// Unconstrained linear map x ↦ x·M learned by ridge-regularized least squares.
struct AffineTransform {
  Matrix matrix;
  double gamma = 0.0;
  double learning_rate = 0.0;
  int iterations_run = 0;
  bool converged = false;
  double final_objective = 0.0;
  /// Objective before the first step and after each step.
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;
};

struct AffineOptions {
  double gamma = 1.0;
  /// Defaults to 1/(2·(‖BᵀB‖_F + γ)).
  std::optional<double> learning_rate;
  int max_iters = 5000;
  /// Stop once ‖∇‖_F falls below this.
  double tol = 1e-8;
};

/// Gradient descent on Σ‖a_i − b_i·M‖² + γ‖M‖_F², starting from M = 0.
///
/// The gradient 2·Bᵀ(B·M − A) + 2γ·M is evaluated through the d×d Gram
/// matrices, so each step costs O(d³). After the loop the result is compared
/// against the closed-form ridge solution and a warning is attached when they
/// differ by more than 1e-4 relative. Throws NumericError when the objective
/// rises for 10 consecutive steps.
AffineTransform fit_affine(const Embedding& target, const Embedding& source,
                           const AffineOptions& options = {});

/// Σ‖a_i − b_i·M‖² + γ‖M‖_F², evaluated row by row.
double affine_objective(const Embedding& target, const Embedding& source, const Matrix& m,
                        double gamma);

/// Row map x ↦ x·M.
Embedding apply_affine(const Embedding& e, const AffineTransform& t);

}  // namespace embalign
