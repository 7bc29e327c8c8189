#pragma once

#include "psd/errors.hpp"
#include "psd/scalar.hpp"

#include <gtest/gtest.h>

namespace psd::testing {

inline Rational Q(long p, long q = 1) { return Rational(p) / Rational(q); }

}  // namespace psd::testing

#define EXPECT_PSD_ERROR(stmt, expected_kind)                         \
  do {                                                                \
    try {                                                             \
      stmt;                                                           \
      ADD_FAILURE() << "expected psd::Error from " #stmt;             \
    } catch (const psd::Error& e) {                                   \
      EXPECT_EQ(e.kind(), psd::ErrorKind::expected_kind) << e.what(); \
    }                                                                 \
  } while (0)
