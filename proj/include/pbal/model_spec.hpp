#pragma once

#include <optional>
#include <string>

#include "pbal/esc.hpp"
#include "pbal/gibbs.hpp"

namespace pbal {

// Textual model descriptions shared by the CLI and config files.
//
// Size-distribution specs:  shiftbinom:N,p | ztbinom:N,p | ztpois:lambda |
//                           ztnegbinom:r,p | logarithmic:p
// Count-mixing specs:       shifted-poisson:lambda | dirac:K
// Compact model specs:      crp:theta | pyp:sigma,theta | dirmult:K,gamma |
//                           coupon:K | neutral:<q-spec> | mfm:gamma,<q-spec> |
//                           esc:<mu-spec>
MuFamily parse_mu(const std::string& spec);
CountDistribution parse_q(const std::string& spec);
GibbsModel parse_model(const std::string& spec);

// Flag-style description used by the CLI (`--model crp --theta 1 ...`);
// assembled into a compact spec string.
struct ModelFlags {
  std::string model;  // crp | pyp | dirmult | coupon | neutral | mfm | esc
  std::optional<double> theta;
  std::optional<double> sigma;
  std::optional<int> K;
  std::optional<double> gamma;
  std::string q;   // q-spec for neutral / mfm
  std::string mu;  // mu-spec for esc

  GibbsModel build() const;
  std::string compact() const;
};

}  // namespace pbal
