#pragma once

#include <stdexcept>
#include <string>

namespace crlab {

// Malformed arguments: unknown variable names, alphabet mismatches,
// out-of-range symbols.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically undefined requests, e.g. conditioning on a null event.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A computed information measure came out negative beyond float noise.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A joint handed to a theorem check lacks a required deterministic relation.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bitstream header does not parse or does not match the decoder setup.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic decoder ran out of data or lost synchronisation.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Encoder was asked to code a symbol its frequency table cannot represent.
class ModelCoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crlab
