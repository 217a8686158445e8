#include "embalign/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "embalign/error.hpp"

namespace embalign {
namespace {

// Applies the plane rotation [c s; -s c] to rows p and q of m (which hold
// columns of the logical matrix).
void rotate_pair(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
  auto rp = m.row(p);
  auto rq = m.row(q);
  for (std::size_t i = 0; i < rp.size(); ++i) {
    const double xp = rp[i];
    const double xq = rq[i];
    rp[i] = c * xp - s * xq;
    rq[i] = s * xp + c * xq;
  }
}

// Fills rows of `basis` flagged as missing with unit vectors orthogonal to
// every other row, drawing candidates from the standard basis.
void complete_orthonormal(Matrix& basis, const std::vector<bool>& present) {
  const std::size_t d = basis.cols();
  std::vector<bool> have = present;
  for (std::size_t r = 0; r < basis.rows(); ++r) {
    if (have[r]) continue;
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < d; ++e) {
      std::vector<double> v(d, 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t o = 0; o < basis.rows(); ++o) {
          if (!have[o]) continue;
          const double proj = dot(v, basis.row(o));
          const auto br = basis.row(o);
          for (std::size_t k = 0; k < d; ++k) v[k] -= proj * br[k];
        }
      }
      const double nv = std::sqrt(squared_norm(v));
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
      }
    }
    auto out = basis.row(r);
    for (std::size_t k = 0; k < d; ++k) out[k] = best[k] / best_norm;
    have[r] = true;
  }
}

}  // namespace

SvdResult svd_small(const Matrix& h, const SvdOptions& options) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw NumericError("svd_small needs a non-empty square matrix, got " + shape_string(h));
  }
  for (double v : h.data()) {
    if (!std::isfinite(v)) throw NumericError("svd_small: non-finite matrix entry");
  }
  const std::size_t d = h.rows();
  const long cap = options.max_sweeps > 0 ? options.max_sweeps
                                          : 100L * static_cast<long>(d) * static_cast<long>(d);

  // Row p of `w` is column p of the working matrix; likewise for `v`.
  Matrix w = h.transposed();
  Matrix v = Matrix::identity(d);

  int sweeps = 0;
  bool converged = d == 1;
  while (!converged) {
    if (sweeps >= cap) {
      throw NumericError("svd_small did not converge after " + std::to_string(cap) + " sweeps");
    }
    ++sweeps;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double alpha = squared_norm(w.row(p));
        const double beta = squared_norm(w.row(q));
        const double gamma = dot(w.row(p), w.row(q));
        if (gamma == 0.0 || std::abs(gamma) <= options.tolerance * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate_pair(w, p, q, c, s);
        rotate_pair(v, p, q, c, s);
      }
    }
    converged = !rotated;
  }

  std::vector<double> sigma(d);
  for (std::size_t p = 0; p < d; ++p) sigma[p] = std::sqrt(squared_norm(w.row(p)));

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double sigma_max = sigma[order.front()];
  const double zero_cut = sigma_max * static_cast<double>(d) * 1e-15;

  SvdResult out;
  out.sweeps = sweeps;
  out.singular_values.resize(d);
  Matrix u_cols(d, d);  // row r = column r of U
  Matrix v_cols(d, d);  // row r = column r of V
  std::vector<bool> present(d, false);
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t p = order[r];
    const auto vr = v.row(p);
    std::copy(vr.begin(), vr.end(), v_cols.row(r).begin());
    if (sigma[p] > zero_cut && sigma[p] > 0.0) {
      out.singular_values[r] = sigma[p];
      const auto wr = w.row(p);
      auto ur = u_cols.row(r);
      for (std::size_t k = 0; k < d; ++k) ur[k] = wr[k] / sigma[p];
      present[r] = true;
    } else {
      out.singular_values[r] = sigma[p];
    }
  }
  complete_orthonormal(u_cols, present);

  out.u = u_cols.transposed();
  out.v_t = std::move(v_cols);
  return out;
}

Matrix rotation_from_svd(const SvdResult& svd, bool proper) {
  Matrix r = svd.u * svd.v_t;
  if (proper && determinant(r) < 0.0) {
    Matrix u = svd.u;
    const std::size_t last = u.cols() - 1;
    for (std::size_t i = 0; i < u.rows(); ++i) u(i, last) = -u(i, last);
    r = u * svd.v_t;
  }
  return r;
}

}  // namespace embalign
