#include "subset/core.hpp"

#include <algorithm>
#include <cmath>

namespace subset {

TimeSeriesMatrix::TimeSeriesMatrix(std::vector<std::vector<double>> rows,
                                   std::vector<std::string> variate_names,
                                   std::vector<std::string> time_labels)
    : rows_(std::move(rows)),
      names_(std::move(variate_names)),
      time_labels_(std::move(time_labels)) {
  if (rows_.empty()) throw InputError("empty input: no variates");
  const std::size_t n = rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != n) throw InputError("ragged rows: all variates must have equal length");
  }
  if (n < 2) throw InputError("empty input: series length must be at least 2");
  for (const auto& r : rows_) {
    for (double v : r) {
      if (!std::isfinite(v)) throw InputError("non-finite observation");
    }
  }
  if (names_.empty()) {
    for (std::size_t i = 0; i < rows_.size(); ++i) names_.push_back("V" + std::to_string(i + 1));
  }
  if (names_.size() != rows_.size()) throw InputError("variate name count does not match rows");
  if (!time_labels_.empty() && time_labels_.size() != n) {
    throw InputError("time label count does not match series length");
  }
}

bool TimeSeriesMatrix::is_count_data() const {
  for (const auto& r : rows_) {
    for (double v : r) {
      if (v < 0.0 || v != std::floor(v)) return false;
    }
  }
  return true;
}

TimeSeriesMatrix make_matrix(std::vector<std::vector<double>> rows, std::vector<std::string> names) {
  return TimeSeriesMatrix(std::move(rows), std::move(names));
}

const char* to_string(ChangeKind kind) { return kind == ChangeKind::sparse ? "sparse" : "dense"; }

ChangeKind change_kind_from_string(const std::string& s) {
  if (s == "sparse") return ChangeKind::sparse;
  if (s == "dense") return ChangeKind::dense;
  throw InputError("unknown change kind: " + s);
}

const char* to_string(PenaltySource source) {
  switch (source) {
    case PenaltySource::theoretical: return "theoretical";
    case PenaltySource::calibrated: return "calibrated";
    case PenaltySource::manual: return "manual";
  }
  return "manual";
}

PenaltySource penalty_source_from_string(const std::string& s) {
  if (s == "theoretical") return PenaltySource::theoretical;
  if (s == "calibrated") return PenaltySource::calibrated;
  if (s == "manual") return PenaltySource::manual;
  throw InputError("unknown penalty source: " + s);
}

double PenaltyConfig::operator()(std::size_t p) const {
  return std::min(beta + alpha * static_cast<double>(p), K);
}

void PenaltyConfig::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(K)) {
    throw InputError("penalties must be finite");
  }
  if (alpha < 0.0 || beta < 0.0) throw InputError("alpha and beta must be non-negative");
  if (K < beta) throw InputError("K must be at least beta");
}

const char* to_string(ModelKind kind) { return kind == ModelKind::gaussian ? "gaussian" : "negbin"; }

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ModelKind::gaussian;
  if (s == "negbin") return ModelKind::negbin;
  throw InputError("unknown model: " + s + " (expected gaussian or negbin)");
}

std::vector<std::size_t> SegmentationResult::taus() const {
  std::vector<std::size_t> out;
  out.reserve(detections.size());
  for (const auto& d : detections) out.push_back(d.tau);
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_seed(seed, stream)) {}

RandomSource RandomSource::substream(std::uint64_t index) const {
  return RandomSource(seed_, mix_seed(stream_, index));
}

std::size_t RandomSource::uniform_index(std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> dist(lo, hi);
  return dist(engine_);
}

double RandomSource::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RandomSource::negbin(double r, double p) {
  if (!(r > 0.0) || !(p > 0.0) || !(p < 1.0)) {
    throw InputError("negative binomial parameters out of range");
  }
  std::gamma_distribution<double> gamma(r, (1.0 - p) / p);
  const double rate = gamma(engine_);
  if (rate <= 0.0) return 0.0;
  std::poisson_distribution<long long> poisson(rate);
  return static_cast<double>(poisson(engine_));
}

std::size_t log_tolerance(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
}

}  // namespace subset
