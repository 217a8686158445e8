#include "embalign/orientation.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "embalign/error.hpp"
#include "embalign/kernels.hpp"
#include "embalign/svd.hpp"

namespace embalign {
namespace {

// Relative thresholds for flagging a cross-covariance whose optimal rotation
// is not unique.
constexpr double kRepeatedGap = 1e-10;
constexpr double kRankDeficient = 1e-12;

std::vector<std::string> degeneracy_warnings(const std::vector<double>& sigma) {
  std::vector<std::string> out;
  if (sigma.empty()) return out;
  const double top = sigma.front();
  if (top == 0.0) {
    out.emplace_back("cross-covariance is zero; rotation is arbitrary");
    return out;
  }
  if (sigma.back() <= kRankDeficient * top) {
    out.emplace_back("cross-covariance is rank deficient; rotation is not unique");
  }
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i) {
    if (sigma[i] - sigma[i + 1] <= kRepeatedGap * top) {
      out.emplace_back("cross-covariance has repeated singular values; rotation is not unique");
      break;
    }
  }
  return out;
}

// Rotation about the origin for rows that are already prepared (centered
// and/or normalized as the variant requires).
Transform fit_rotation(const Embedding& target, const Embedding& source, bool proper) {
  const Matrix h = cross_covariance(target, source);
  const SvdResult svd = svd_small(h);
  Transform t = Transform::identity(target.dim());
  t.rotation = rotation_from_svd(svd, proper);
  t.proper = proper;
  t.singular_values = svd.singular_values;
  t.warnings = degeneracy_warnings(svd.singular_values);
  return t;
}

struct Prepared {
  Embedding target;
  Embedding source;
};

Prepared prepare(const Embedding& target, const Embedding& source, const FitOptions& options) {
  require_same_shape(target, source, "alignment");
  if (!options.normalize) return {target, source};
  return {normalize_rows(target), normalize_rows(source)};
}

}  // namespace

Transform Transform::identity(std::size_t d) {
  Transform t;
  t.rotation = Matrix::identity(d);
  t.source_mean.assign(d, 0.0);
  t.target_mean.assign(d, 0.0);
  return t;
}

Matrix cross_covariance(const Embedding& target, const Embedding& source) {
  require_same_shape(target, source, "cross_covariance");
  return kernels::cross_covariance(target.vectors(), source.vectors());
}

RotationFit ao_rotation(const Embedding& target, const Embedding& source,
                        const FitOptions& options) {
  Prepared in = prepare(target, source, options);
  Transform t = fit_rotation(in.target, in.source, options.proper);
  t.fit_normalized = options.normalize;
  Embedding aligned = apply_transform(in.source, t);
  return {std::move(t), std::move(aligned)};
}

CenteredFit ao_centered(const Embedding& target, const Embedding& source,
                        const FitOptions& options) {
  Prepared in = prepare(target, source, options);
  std::vector<double> source_mean;
  Embedding target_hat = center_rows(in.target);
  Embedding source_hat = center_rows(in.source, &source_mean);
  Transform t = fit_rotation(target_hat, source_hat, options.proper);
  t.source_mean = std::move(source_mean);
  t.centered = true;
  t.fit_normalized = options.normalize;
  Embedding aligned = apply_transform(in.source, t);
  return {std::move(t), std::move(target_hat), std::move(aligned)};
}

RotationFit absolute_orientation(const Embedding& target, const Embedding& source,
                                 const FitOptions& options) {
  CenteredFit fit = ao_centered(target, source, options);
  const Embedding& fitted_target = options.normalize ? normalize_rows(target) : target;
  fit.transform.target_mean = kernels::column_means(fitted_target.vectors());
  Embedding aligned =
      apply_transform(options.normalize ? normalize_rows(source) : source, fit.transform);
  return {std::move(fit.transform), std::move(aligned)};
}

double optimal_scale(const Embedding& target, const Embedding& source_rotated) {
  require_same_shape(target, source_rotated, "optimal_scale");
  const double denom = kernels::ordered_sum(
      kernels::row_dots(source_rotated.vectors(), source_rotated.vectors()));
  if (denom <= 0.0) throw NumericError("degenerate source norm");
  const double numer =
      kernels::ordered_sum(kernels::row_dots(target.vectors(), source_rotated.vectors()));
  const double s = numer / denom;
  if (!(s > 0.0)) {
    std::ostringstream msg;
    msg << "optimal scale " << s << " is not positive; inputs are not alignable by scaling";
    throw NumericError(msg.str());
  }
  return s;
}

RotationFit ao_scaling(const Embedding& target, const Embedding& source,
                       const FitOptions& options) {
  Prepared in = prepare(target, source, options);
  Transform t = fit_rotation(in.target, in.source, options.proper);
  t.fit_normalized = options.normalize;
  const Embedding rotated = apply_transform(in.source, t);
  t.scale = optimal_scale(in.target, rotated);
  t.scaled = true;
  Embedding aligned = apply_transform(in.source, t);
  return {std::move(t), std::move(aligned)};
}

CenteredFit ao_centered_scaling(const Embedding& target, const Embedding& source,
                                const FitOptions& options) {
  CenteredFit fit = ao_centered(target, source, options);
  fit.transform.scale = optimal_scale(fit.target_centered, fit.aligned);
  fit.transform.scaled = true;
  Embedding aligned =
      apply_transform(options.normalize ? normalize_rows(source) : source, fit.transform);
  return {std::move(fit.transform), std::move(fit.target_centered), std::move(aligned)};
}

Embedding normalize_rows(const Embedding& e) {
  const std::vector<double> norms = kernels::row_norms(e.vectors());
  std::string zero_words;
  std::size_t zero_count = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] == 0.0) {
      if (zero_count < 10) zero_words += (zero_count ? ", " : "") + e.word(i);
      ++zero_count;
    }
  }
  if (zero_count > 0) {
    throw NumericError("cannot normalize " + std::to_string(zero_count) +
                       " zero-norm row(s): " + zero_words + (zero_count > 10 ? ", ..." : ""));
  }
  Matrix m = e.vectors();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (double& v : m.row(i)) v /= norms[i];
  }
  return e.with_vectors(std::move(m));
}

Embedding center_rows(const Embedding& e, std::vector<double>* mean) {
  std::vector<double> mu = kernels::column_means(e.vectors());
  Matrix m = e.vectors();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= mu[k];
  }
  if (mean) *mean = std::move(mu);
  return e.with_vectors(std::move(m));
}

Embedding apply_transform(const Embedding& e, const Transform& t) {
  if (t.dim() != e.dim()) {
    throw NumericError("transform of dimension " + std::to_string(t.dim()) +
                       " applied to embedding " + shape_string(e));
  }
  const kernels::RowMap map{t.rotation, t.scale, t.source_mean, t.target_mean};
  return e.with_vectors(kernels::map_rows(e.vectors(), map));
}

}  // namespace embalign
