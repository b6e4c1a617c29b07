#pragma once

#include <stdexcept>
#include <string>

namespace sparsetd {

// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SPARSETD_ERROR_TYPE(Name)                        \
  struct Name : Error {                                  \
    explicit Name(const std::string& what_arg)           \
        : Error(std::string(#Name) + ": " + what_arg) {} \
  }

SPARSETD_ERROR_TYPE(NonFiniteInput);
SPARSETD_ERROR_TYPE(NonFiniteResult);
SPARSETD_ERROR_TYPE(OutOfRange);
SPARSETD_ERROR_TYPE(DimensionMismatch);
SPARSETD_ERROR_TYPE(TooFewUnits);
SPARSETD_ERROR_TYPE(InvalidAction);
SPARSETD_ERROR_TYPE(InvalidValue);
SPARSETD_ERROR_TYPE(EmptyActionSet);
SPARSETD_ERROR_TYPE(NonEpisodic);
SPARSETD_ERROR_TYPE(NoSuccessfulEpisodes);
SPARSETD_ERROR_TYPE(ParseError);
SPARSETD_ERROR_TYPE(UnknownKey);
SPARSETD_ERROR_TYPE(CorruptCheckpoint);
SPARSETD_ERROR_TYPE(UnsupportedEnv);

#undef SPARSETD_ERROR_TYPE

}  // namespace sparsetd
