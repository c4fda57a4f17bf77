// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace synthgen {

// Root of every error raised by the library. Each module derives its own
// error kinds so callers can catch by category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SYNTHGEN_DEFINE_ERROR(Name, Base)   \
  class Name : public Base {                \
   public:                                  \
    using Base::Base;                       \
  }

}  // namespace synthgen
