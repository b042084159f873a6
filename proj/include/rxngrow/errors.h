//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_ERRORS_H_
#define RXNGROW_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rxngrow {

// Base for every error the pipeline raises. Each concrete type carries the
// process exit code the CLI maps it to.
class Error: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;

  virtual int exit_code() const noexcept { return 1; }
  virtual const char *kind() const noexcept { return "Error"; }
};

#define RXNGROW_DEFINE_ERROR(Name, code)                                      \
  class Name: public Error {                                                   \
  public:                                                                      \
    using Error::Error;                                                        \
    int exit_code() const noexcept override { return code; }                   \
    const char *kind() const noexcept override { return #Name; }               \
  }

// Malformed input files, including missing ones.
RXNGROW_DEFINE_ERROR(FormatError, 2);
RXNGROW_DEFINE_ERROR(EmptyLibraryError, 3);
RXNGROW_DEFINE_ERROR(ParseError, 4);
RXNGROW_DEFINE_ERROR(EngineError, 5);
RXNGROW_DEFINE_ERROR(EmptyBaseError, 6);
RXNGROW_DEFINE_ERROR(UnknownIdError, 7);
RXNGROW_DEFINE_ERROR(EncoderUnavailableError, 8);
RXNGROW_DEFINE_ERROR(DimensionMismatchError, 9);
RXNGROW_DEFINE_ERROR(ZeroNormError, 10);
RXNGROW_DEFINE_ERROR(EmptyPoolError, 11);
RXNGROW_DEFINE_ERROR(ToolNotFoundError, 12);
RXNGROW_DEFINE_ERROR(ConversionError, 13);
RXNGROW_DEFINE_ERROR(DockingFailure, 14);
RXNGROW_DEFINE_ERROR(IndexError, 15);
RXNGROW_DEFINE_ERROR(EmptyActionSetError, 16);
RXNGROW_DEFINE_ERROR(NonFiniteLossError, 17);
RXNGROW_DEFINE_ERROR(ConfigError, 18);

#undef RXNGROW_DEFINE_ERROR

}  // namespace rxngrow

#endif  // RXNGROW_ERRORS_H_
