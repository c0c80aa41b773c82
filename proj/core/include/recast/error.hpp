#pragma once

#include <stdexcept>
#include <string>

namespace recast {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DSL or table text. `path` is a JSON-pointer-like location
/// such as `$.components[1].coordinate_system.x2`.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::string reason)
      : Error(path + ": " + reason), path_(std::move(path)), reason_(std::move(reason)) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A structural edit was rejected; the input document is unchanged.
class EditError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

/// A layout specification cannot be resolved (missing interval fields,
/// inverted size range, value count mismatch).
class LayoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace recast

namespace recast {

/// A pipeline step failed terminally. `label` names the model call
/// ("step1", "step3-0-1", ...) when one is involved.
class PipelineError : public Error {
 public:
  PipelineError(std::string label, const std::string& what) : Error(label + ": " + what), label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

}  // namespace recast
