#pragma once

#include <stdexcept>
#include <string>

namespace fracppk {

/// Root of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the admissible numeric domain (e.g. |z| above the series cap).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A series or iteration did not reach its stopping criterion, or lost too many
/// digits to cancellation to honour the requested tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Enumeration or truncation limit exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

/// Inverse-subordinator crossing not reached within the step budget.
class HorizonOverflow : public Error {
 public:
  using Error::Error;
};

/// Pooling left fewer than two bins for a chi-square test.
class DegenerateBins : public Error {
 public:
  using Error::Error;
};

}  // namespace fracppk
