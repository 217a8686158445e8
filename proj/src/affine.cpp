#include "embalign/affine.hpp"

#include <algorithm>
#include <cmath>

#include "embalign/error.hpp"
#include "embalign/kernels.hpp"

namespace embalign {
namespace {

constexpr int kDivergenceRun = 10;
constexpr double kClosedFormTolerance = 1e-4;

double inner(const Matrix& x, const Matrix& y) { return dot(x.data(), y.data()); }

// Solves (G + γI)·X = C by Cholesky. Returns nullopt if not positive definite.
std::optional<Matrix> ridge_closed_form(const Matrix& g, const Matrix& c, double gamma) {
  const std::size_t d = g.rows();
  Matrix l(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = g(j, j) + gamma;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) return std::nullopt;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = g(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  Matrix x = c;
  for (std::size_t col = 0; col < c.cols(); ++col) {
    for (std::size_t i = 0; i < d; ++i) {
      double v = x(i, col);
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * x(k, col);
      x(i, col) = v / l(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double v = x(i, col);
      for (std::size_t k = i + 1; k < d; ++k) v -= l(k, i) * x(k, col);
      x(i, col) = v / l(i, i);
    }
  }
  return x;
}

}  // namespace

double affine_objective(const Embedding& target, const Embedding& source, const Matrix& m,
                        double gamma) {
  require_same_shape(target, source, "affine_objective");
  const std::size_t d = target.dim();
  const std::vector<double> zero(d, 0.0);
  const Matrix mapped = kernels::map_rows(source.vectors(), {m, 1.0, zero, zero});
  const double residual =
      kernels::ordered_sum(kernels::row_squared_distances(target.vectors(), mapped));
  return residual + gamma * squared_norm(m.data());
}

AffineTransform fit_affine(const Embedding& target, const Embedding& source,
                           const AffineOptions& options) {
  require_same_shape(target, source, "fit_affine");
  if (!(options.gamma >= 0.0)) throw UsageError("fit_affine: gamma must be nonnegative");
  if (options.max_iters < 0) throw UsageError("fit_affine: max_iters must be nonnegative");

  const std::size_t d = target.dim();
  const Matrix bt = source.vectors().transposed();
  const Matrix g = bt * source.vectors();  // BᵀB
  const Matrix c = bt * target.vectors();  // BᵀA
  const double a_norm2 = squared_norm(target.vectors().data());
  const double gamma = options.gamma;

  const double lr = options.learning_rate.value_or(1.0 / (2.0 * (frobenius_norm(g) + gamma)));
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw UsageError("fit_affine: learning rate must be positive and finite");
  }

  // f(M) = ‖A‖² − 2⟨M, C⟩ + ⟨M, G·M⟩ + γ‖M‖².
  auto objective = [&](const Matrix& m, const Matrix& gm) {
    return a_norm2 - 2.0 * inner(m, c) + inner(m, gm) + gamma * inner(m, m);
  };

  AffineTransform out;
  out.gamma = gamma;
  out.learning_rate = lr;
  Matrix m(d, d);
  Matrix gm = g * m;
  double f = objective(m, gm);
  out.objective_trace.push_back(f);

  int rising = 0;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    Matrix grad = gm - c;
    auto gd = grad.data();
    const auto md = m.data();
    for (std::size_t i = 0; i < gd.size(); ++i) gd[i] = 2.0 * (gd[i] + gamma * md[i]);
    if (frobenius_norm(grad) < options.tol) {
      out.converged = true;
      break;
    }
    auto mw = m.data();
    for (std::size_t i = 0; i < mw.size(); ++i) mw[i] -= lr * gd[i];
    gm = g * m;
    const double next = objective(m, gm);
    out.iterations_run = iter + 1;
    out.objective_trace.push_back(next);
    if (!std::isfinite(next)) {
      throw NumericError("fit_affine diverged (non-finite objective); try a smaller learning rate");
    }
    // Rounding noise near the optimum is not a rise.
    rising = next > f + 1e-12 * std::max(1.0, std::abs(f)) ? rising + 1 : 0;
    if (rising >= kDivergenceRun) {
      throw NumericError("fit_affine diverged (objective rose for " +
                         std::to_string(kDivergenceRun) +
                         " consecutive steps); try a smaller learning rate");
    }
    f = next;
  }
  if (!out.converged) {
    out.warnings.push_back("gradient descent stopped at max_iters before reaching tol");
  }

  if (auto exact = ridge_closed_form(g, c, gamma)) {
    const double scale = std::max(frobenius_norm(*exact), 1e-300);
    if (frobenius_norm(m - *exact) > kClosedFormTolerance * scale) {
      out.warnings.push_back("gradient descent result differs from the closed-form ridge "
                             "solution by more than 1e-4 relative");
    }
  } else {
    out.warnings.push_back("BᵀB + γI is singular; closed-form check skipped");
  }

  out.final_objective = std::max(0.0, affine_objective(target, source, m, gamma));
  out.matrix = std::move(m);
  return out;
}

Embedding apply_affine(const Embedding& e, const AffineTransform& t) {
  if (t.matrix.rows() != e.dim() || t.matrix.cols() != e.dim()) {
    throw NumericError("affine map " + shape_string(t.matrix) + " applied to embedding " +
                       shape_string(e));
  }
  const std::vector<double> zero(e.dim(), 0.0);
  return e.with_vectors(kernels::map_rows(e.vectors(), {t.matrix, 1.0, zero, zero}));
}

}  // namespace embalign
