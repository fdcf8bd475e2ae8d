#include "erpx/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "erpx/errors.hpp"

namespace erpx {

AssessmentValue mse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  if (y.size() != yhat.size())
    throw ContractViolation("mse: vectors have different lengths (" + std::to_string(y.size()) +
                            " vs " + std::to_string(yhat.size()) + ")");
  if (y.size() == 0) throw ContractViolation("mse: empty vectors");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    sum += d * d;
  }
  return AssessmentValue{sum / static_cast<double>(y.size())};
}

PredictionVector ensemble_predictions(std::span<const PredictionVector> predictions) {
  if (predictions.empty())
    throw ContractViolation("ensemble_predictions: empty prediction sequence");
  const Eigen::Index n = predictions.front().values.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Provenance provenance = predictions.front().provenance;
  bool mixed = false;
  for (const PredictionVector& p : predictions) {
    if (p.values.size() != n)
      throw ContractViolation("ensemble_predictions: prediction lengths differ");
    sum += p.values;
    if (p.provenance != provenance) mixed = true;
  }
  sum /= static_cast<double>(predictions.size());
  return PredictionVector{std::move(sum), mixed ? Provenance::direct : provenance};
}

PredictionVector ensemble_predictions(const std::vector<PredictionVector>& predictions) {
  return ensemble_predictions(std::span<const PredictionVector>(predictions));
}

Eigen::VectorXd permute_response(const Eigen::VectorXd& y, Seed seed) {
  if (y.size() < 2) throw ContractViolation("permute_response: need length >= 2");
  std::vector<double> values(y.data(), y.data() + y.size());
  Rng rng(seed);
  rng.shuffle(values);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ContractViolation("empirical_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw ContractViolation("empirical_quantile: q=" + std::to_string(q) + " outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double position = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  const auto hi = static_cast<std::size_t>(std::ceil(position));
  if (lo == hi) return sorted[lo];
  const double w = position - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

double empirical_quantile(const std::vector<double>& values, double q) {
  return empirical_quantile(std::span<const double>(values), q);
}

}  // namespace erpx
