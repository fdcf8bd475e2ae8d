#include "erpx/reference.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "erpx/errors.hpp"

namespace erpx {
namespace sim {

namespace {

struct Peak {
  double center;
  double width;
  double height;
};

}  // namespace

Dataset make_spectra_reference(Seed seed, const SpectraReferenceParams& params) {
  const int n = params.n_samples;
  const int p = params.n_wavelengths;
  if (n < 2 || p < 2) throw ContractViolation("make_spectra_reference: degenerate dimensions");

  const double w0 = params.wavelength_start;
  const double w_end = w0 + params.wavelength_step * (p - 1);

  // Component spectra: a few overlapping Gaussian absorption bands each.
  Rng spectra_rng(derive_seed(seed, "component-spectra"));
  std::vector<std::vector<Peak>> components(static_cast<std::size_t>(params.n_components));
  for (auto& peaks : components) {
    const int n_peaks = 2 + static_cast<int>(spectra_rng.below(2));  // 2 or 3 bands
    for (int q = 0; q < n_peaks; ++q) {
      peaks.push_back({spectra_rng.uniform(w0 + 8.0, w_end - 8.0),
                       spectra_rng.uniform(10.0, 35.0),
                       spectra_rng.uniform(0.15, 0.6)});
    }
  }

  auto component_value = [&](int k, double w) {
    double v = 0.0;
    for (const Peak& peak : components[static_cast<std::size_t>(k)]) {
      const double z = (w - peak.center) / peak.width;
      v += peak.height * std::exp(-0.5 * z * z);
    }
    return v;
  };

  // Sample-specific component concentrations and baseline offsets.
  Rng sample_rng(derive_seed(seed, "sample-levels"));
  Eigen::MatrixXd concentration(n, params.n_components);
  Eigen::VectorXd offset(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < params.n_components; ++k)
      concentration(i, k) = 0.3 + 0.5 * sample_rng.uniform();
    offset[i] = sample_rng.normal(0.0, 0.01);
  }

  Rng noise_rng(derive_seed(seed, "measurement-noise"));
  Eigen::MatrixXd X(n, p);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    const double w = w0 + params.wavelength_step * j;
    names.push_back(std::to_string(static_cast<int>(std::lround(w))));
    const double baseline = 0.05 + 0.12 * (w - w0) / (w_end - w0);
    for (int i = 0; i < n; ++i) {
      double absorbance = baseline + offset[i];
      for (int k = 0; k < params.n_components; ++k)
        absorbance += concentration(i, k) * component_value(k, w);
      X(i, j) = absorbance + noise_rng.normal(0.0, params.measurement_noise_sd);
    }
  }

  // Rating response: linear in half of the component concentrations,
  // standardized, then mapped to the rating scale plus measurement noise.
  Rng response_rng(derive_seed(seed, "response"));
  const int n_active = std::max(1, params.n_components / 2);
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(params.n_components);
  for (int k = 0; k < n_active; ++k)
    gamma[k] = response_rng.uniform(0.5, 1.0) * (response_rng.below(2) == 0 ? 1.0 : -1.0);

  Eigen::VectorXd raw = concentration * gamma;
  const double raw_mean = raw.mean();
  const double raw_sd =
      std::sqrt((raw.array() - raw_mean).square().sum() / static_cast<double>(n - 1));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double standardized = raw_sd > 0.0 ? (raw[i] - raw_mean) / raw_sd : 0.0;
    y[i] = params.response_center + 0.4 * params.response_spread * standardized +
           response_rng.normal(0.0, params.response_noise_sd);
  }

  return Dataset::infer(std::move(y), std::move(X), std::move(names));
}

}  // namespace sim
}  // namespace erpx
