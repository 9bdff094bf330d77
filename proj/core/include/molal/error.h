// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_ERROR_H_
#define MOLAL_ERROR_H_

#include <stdexcept>
#include <string>

namespace molal {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, inconsistent arguments, schema errors.
// The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Error carrying a module-specific code enum alongside the message.
template <class Code>
class CodedError : public Error {
 public:
  CodedError(Code code, const std::string &what) : Error(what), code_(code) { }

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace molal

#endif  // MOLAL_ERROR_H_
