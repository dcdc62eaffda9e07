#pragma once

#include "hmfloquet/drive.hpp"

namespace hmf {

/// Tunneling v > 0, attractive nonlinearity chi >= 0 (the -chi |c|^2 c
/// convention), and the harmonic-mixing drive.
struct SystemParams {
  double tunneling = 1.0;
  double nonlinearity = 0.0;
  DriveParams drive;

  void validate() const;
  SystemParams with_amplitude_over_frequency(double a_over_w) const;
  SystemParams with_phase(double phi) const;
  SystemParams with_nonlinearity(double chi) const;
};

}  // namespace hmf
