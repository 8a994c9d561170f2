#pragma once

#include <stdexcept>
#include <string>

namespace wellround {

enum class ErrorCode {
  invalid_argument,
  singular_basis,
  dimension_mismatch,
  enumeration_budget_exceeded,
  not_well_rounded,
  not_generic_well_rounded,
  rank_deficient,
  index_out_of_range,
  numerically_singular_minor,
  not_squarefree,
  not_a_cover,
  unbounded_element,
  hypothesis_violated,
  declaration_false,
  window_too_small,
  parse_error,
  io_error,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace wellround
