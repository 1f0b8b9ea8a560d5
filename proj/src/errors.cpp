#include "rhowave/errors.hpp"

namespace rhowave {

const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_spec: return "invalid-spec";
    case errc::invalid_coefficient: return "invalid-coefficient";
    case errc::invalid_profile: return "invalid-profile";
    case errc::degenerate_profile: return "degenerate-profile";
    case errc::invalid_bc: return "invalid-bc";
    case errc::assumption_a1_violated: return "assumption-a1-violated";
    case errc::assumption_a2_violated: return "assumption-a2-violated";
    case errc::unsupported_case: return "unsupported-case";
    case errc::invalid_case: return "invalid-case";
    case errc::resolution_error: return "resolution-error";
    case errc::numeric_error: return "numeric-error";
    case errc::domain_error: return "domain-error";
    case errc::invalid_period: return "invalid-period";
    case errc::invalid_truncation: return "invalid-truncation";
    case errc::inconclusive_gap: return "inconclusive-gap";
    case errc::mu_in_spectrum: return "mu-in-spectrum";
    case errc::mu_below_window: return "mu-below-window";
    case errc::certification_failure: return "certification-failure";
    case errc::degenerate_norm: return "degenerate-norm";
    case errc::aliasing_error: return "aliasing-error";
    case errc::truncation_error: return "truncation-error";
    case errc::non_convergence: return "non-convergence";
    case errc::io_error: return "io-error";
  }
  return "unknown-error";
}

}  // namespace rhowave
