#pragma once

#include <stdexcept>
#include <string>

namespace dehaze {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched widths, heights or channel counts between images that must agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// An external process failed or produced unusable output.
class ProcessError : public Error {
 public:
  using Error::Error;
};

class PngError : public Error {
 public:
  enum class Kind { missing_file, bad_signature, unsupported_format, corrupt, write_failed };

  PngError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace dehaze
