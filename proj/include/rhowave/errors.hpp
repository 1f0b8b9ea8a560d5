#pragma once

#include <stdexcept>
#include <string>

namespace rhowave {

// Failure categories, used to pick CLI exit codes:
//   config errors -> 2, certification failures -> 1, numeric trouble -> 3.
enum class errc {
  invalid_spec,
  invalid_coefficient,
  invalid_profile,
  degenerate_profile,
  invalid_bc,
  assumption_a1_violated,
  assumption_a2_violated,
  unsupported_case,
  invalid_case,
  resolution_error,
  numeric_error,
  domain_error,
  invalid_period,
  invalid_truncation,
  inconclusive_gap,
  mu_in_spectrum,
  mu_below_window,
  certification_failure,
  degenerate_norm,
  aliasing_error,
  truncation_error,
  non_convergence,
  io_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace rhowave
