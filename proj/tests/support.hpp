#pragma once

#include <cmath>
#include <complex>

#include <doctest.h>

#define CHECK_NEAR(a, b, tol)                                        \
  do {                                                               \
    const auto check_near_a_ = (a);                                  \
    const auto check_near_b_ = (b);                                  \
    INFO(#a " = " << check_near_a_ << ", " #b " = " << check_near_b_); \
    CHECK(std::abs(check_near_a_ - check_near_b_) <= (tol));          \
  } while (0)

#include <optional>

#include "paritysim/error.hpp"

/// Kind of the paritysim::Error thrown by fn, or nullopt if it returns.
template <class Fn>
std::optional<paritysim::ErrorKind> error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const paritysim::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
