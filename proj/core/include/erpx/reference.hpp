#ifndef ERPX_REFERENCE_HPP
#define ERPX_REFERENCE_HPP

#include "erpx/rng.hpp"
#include "erpx/types.hpp"

namespace erpx {
namespace sim {

// Deterministic emulator of a small NIR calibration problem: smooth
// absorbance spectra driven by a handful of latent component
// concentrations, and a rating-style response that is linear in a subset of
// those concentrations. Stands in for spectra-plus-rating data when the
// real file is not available; feature names are wavelengths (nm).
struct SpectraReferenceParams {
  int n_samples = 33;
  int n_wavelengths = 226;
  double wavelength_start = 1102.0;
  double wavelength_step = 2.0;
  int n_components = 6;
  double measurement_noise_sd = 0.004;
  double response_noise_sd = 0.35;
  double response_center = 88.0;
  double response_spread = 6.0;
};

Dataset make_spectra_reference(Seed seed, const SpectraReferenceParams& params = {});

}  // namespace sim
}  // namespace erpx

#endif
