#pragma once

#include <stdexcept>
#include <string>

namespace polyvar {

enum class errc {
  invalid_params,
  invalid_spec,
  geometry_mismatch,
  order_out_of_range,
  not_coercive,
  singular_solve,
  eigen_solver_failure,
  no_bracket,
  no_convergence,
  nonpositive_denominator,
  quadrature_failure,
  under_resolved,
  wrong_geometry,
  config_error,
};

const char* to_string(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

inline const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_params: return "invalid-params";
    case errc::invalid_spec: return "invalid-spec";
    case errc::geometry_mismatch: return "geometry-mismatch";
    case errc::order_out_of_range: return "order-out-of-range";
    case errc::not_coercive: return "not-coercive";
    case errc::singular_solve: return "singular-solve";
    case errc::eigen_solver_failure: return "eigen-solver-failure";
    case errc::no_bracket: return "no-bracket";
    case errc::no_convergence: return "no-convergence";
    case errc::nonpositive_denominator: return "nonpositive-denominator";
    case errc::quadrature_failure: return "quadrature-failure";
    case errc::under_resolved: return "under-resolved";
    case errc::wrong_geometry: return "wrong-geometry";
    case errc::config_error: return "config-error";
  }
  return "unknown-error";
}

}  // namespace polyvar
