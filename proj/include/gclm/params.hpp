#pragma once

#include <cmath>
#include <string>

#include "gclm/error.hpp"
#include "gclm/spectral_field.hpp"

namespace gclm {

struct GclmParams {
  double a = 0.0;
  double sigma = 1.0;
  double nu = 1.0;
  double omega_av = 0.0;

  void validate(Domain d) const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw Error(ErrorCode::Validation, "params.sigma: must be finite and >= 0");
    if (!(nu >= 0.0) || !std::isfinite(nu))
      throw Error(ErrorCode::Validation, "params.nu: must be finite and >= 0");
    if (!std::isfinite(a)) throw Error(ErrorCode::Validation, "params.a: must be finite");
    if (d == Domain::CompactifiedLine) {
      if (sigma != 0.0 && sigma != 1.0 && sigma != 2.0)
        throw Error(ErrorCode::Validation, "params.sigma: line domain needs sigma in {0,1,2}");
      if (omega_av != 0.0)
        throw Error(ErrorCode::Validation, "params.omega_av: must be 0 on the line domain");
    }
  }
};

}  // namespace gclm
