#pragma once

#include <stdexcept>
#include <string>

namespace switchpair {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An argument is outside its domain (non-finite time, negative duration,
// mismatched lengths, too few devices, ...).
struct InvalidInputError : Error {
  using Error::Error;
};

// A pairing precondition is not met (e.g. fewer than five presses).
struct PreconditionError : Error {
  using Error::Error;
};

// Bad session or experiment configuration. Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// A session API was used in a phase that does not allow it, or after the
// session already completed or aborted.
struct ProtocolError : Error {
  using Error::Error;
};

// Public-key bytes do not decode to a point on the curve.
struct InvalidPointError : Error {
  using Error::Error;
};

// Fewer retained timestamps than the minimum needed for key material.
struct InsufficientEntropyError : Error {
  using Error::Error;
};

// Filesystem failure. Maps to CLI exit code 3.
struct IoError : Error {
  using Error::Error;
};

// No key store record for the requested (device, session) pair.
struct NotFoundError : Error {
  using Error::Error;
};

// A key store record failed its checksum or was truncated.
struct IntegrityError : Error {
  using Error::Error;
};

}  // namespace switchpair
