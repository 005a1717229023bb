#include "subset/costs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace subset {

namespace {

double median(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

}  // namespace

double estimate_sigma(std::span<const double> y) {
  if (y.size() < 2) throw InputError("estimate_sigma needs at least 2 observations");
  std::vector<double> diff(y.size() - 1);
  for (std::size_t j = 1; j < y.size(); ++j) diff[j - 1] = y[j] - y[j - 1];
  const double centre = median(diff);
  for (auto& x : diff) x = std::abs(x - centre);
  const double sigma = median(std::move(diff)) / (0.6745 * std::sqrt(2.0));
  if (!(sigma > 0.0)) {
    throw NumericalError("zero scale estimate (constant differences); supply sigma explicitly");
  }
  return sigma;
}

double estimate_dispersion(std::span<const double> y, double r_max) {
  if (y.size() < 2) throw InputError("estimate_dispersion needs at least 2 observations");
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  if (mean <= 0.0) throw NumericalError("degenerate count series (all zero)");
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1.0);
  if (var <= mean) return r_max;
  return std::min(mean * mean / (var - mean), r_max);
}

CostModel CostModel::gaussian(const TimeSeriesMatrix& data, std::vector<double> sigma) {
  CostModel m;
  m.kind_ = ModelKind::gaussian;
  m.d_ = data.dims();
  m.n_ = data.length();
  if (sigma.size() == 1 && m.d_ > 1) sigma.assign(m.d_, sigma.front());
  if (sigma.empty()) {
    for (std::size_t i = 0; i < m.d_; ++i) {
      try {
        sigma.push_back(estimate_sigma(data.row(i)));
      } catch (const NumericalError& e) {
        throw NumericalError("variate '" + data.variate_names()[i] + "': " + e.what());
      }
    }
  }
  if (sigma.size() != m.d_) throw InputError("sigma list must have one entry per variate");
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InputError("sigma must be positive and finite");
  }
  m.sigma_ = std::move(sigma);
  m.var_.resize(m.d_);
  for (std::size_t i = 0; i < m.d_; ++i) m.var_[i] = m.sigma_[i] * m.sigma_[i];

  m.offset_.resize(m.d_);
  for (std::size_t i = 0; i < m.d_; ++i) {
    auto r = data.row(i);
    m.offset_[i] = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(m.n_);
  }
  m.sum_.assign((m.n_ + 1) * m.d_, 0.0);
  m.sumsq_.assign((m.n_ + 1) * m.d_, 0.0);
  for (std::size_t j = 1; j <= m.n_; ++j) {
    for (std::size_t i = 0; i < m.d_; ++i) {
      const double v = data.at(i, j) - m.offset_[i];
      m.sum_[j * m.d_ + i] = m.sum_[(j - 1) * m.d_ + i] + v;
      m.sumsq_[j * m.d_ + i] = m.sumsq_[(j - 1) * m.d_ + i] + v * v;
    }
  }
  return m;
}

CostModel CostModel::negbin(const TimeSeriesMatrix& data, double r_max, std::vector<double> dispersion) {
  if (!data.is_count_data()) {
    throw InputError("negative binomial model requires non-negative integer counts");
  }
  if (!(r_max > 0.0)) throw InputError("dispersion cap must be positive");
  CostModel m;
  m.kind_ = ModelKind::negbin;
  m.d_ = data.dims();
  m.n_ = data.length();
  if (dispersion.empty()) {
    for (std::size_t i = 0; i < m.d_; ++i) {
      try {
        dispersion.push_back(estimate_dispersion(data.row(i), r_max));
      } catch (const NumericalError& e) {
        throw NumericalError("variate '" + data.variate_names()[i] + "': " + e.what());
      }
    }
  }
  if (dispersion.size() == 1) dispersion.assign(m.d_, dispersion[0]);
  if (dispersion.size() != m.d_) throw InputError("dispersion list must have one entry per variate");
  for (double r : dispersion) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("dispersion must be positive and finite");
  }
  m.dispersion_ = std::move(dispersion);
  m.offset_.assign(m.d_, 0.0);
  m.sum_.assign((m.n_ + 1) * m.d_, 0.0);
  m.lbinom_.assign((m.n_ + 1) * m.d_, 0.0);
  for (std::size_t i = 0; i < m.d_; ++i) {
    const double r = m.dispersion_[i];
    const double lg_r = std::lgamma(r);
    for (std::size_t j = 1; j <= m.n_; ++j) {
      const double y = data.at(i, j);
      const double lb = std::lgamma(y + r) - lg_r - std::lgamma(y + 1.0);
      m.sum_[j * m.d_ + i] = m.sum_[(j - 1) * m.d_ + i] + y;
      m.lbinom_[j * m.d_ + i] = m.lbinom_[(j - 1) * m.d_ + i] + lb;
    }
  }
  return m;
}

void CostModel::check_segment(std::size_t i, std::size_t s, std::size_t t) const {
  if (i >= d_) throw InputError("variate index out of range");
  if (s < 1 || t > n_) throw InputError("segment outside 1..n");
  if (s > t) throw InputError("segment start after end (s > t)");
}

double CostModel::cost(std::size_t i, std::size_t s, std::size_t t) const {
  check_segment(i, s, t);
  const double len = static_cast<double>(t - s + 1);
  const double sum = segment_sum(i, s, t);
  if (kind_ == ModelKind::gaussian) {
    const double sq = sumsq_[t * d_ + i] - sumsq_[(s - 1) * d_ + i];
    return std::max(0.0, (sq - sum * sum / len) / var_[i]);
  }
  const double lb = lbinom_[t * d_ + i] - lbinom_[(s - 1) * d_ + i];
  return reduced_from_sum(i, sum, len) - 2.0 * lb;
}

double gaussian_cost(const CostModel& model, std::size_t i, std::size_t s, std::size_t t) {
  if (model.kind() != ModelKind::gaussian) throw InputError("gaussian_cost on a non-Gaussian model");
  return model.cost(i, s, t);
}

double negbin_cost(const CostModel& model, std::size_t i, std::size_t s, std::size_t t) {
  if (model.kind() != ModelKind::negbin) throw InputError("negbin_cost on a non-negbin model");
  return model.cost(i, s, t);
}

}  // namespace subset
