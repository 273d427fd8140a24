#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gamemetrics {

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown state, move or variable name.
class LookupError : public GameError {
 public:
  using GameError::GameError;
};

/// Precondition on an argument violated by the caller.
class ContractError : public GameError {
 public:
  using GameError::GameError;
};

/// The operation does not support this class of game (e.g. concurrent input to
/// the turn-based LP pipeline).
class UnsupportedStructure : public GameError {
 public:
  using GameError::GameError;
};

class NumericError : public GameError {
 public:
  using GameError::GameError;
};

/// Malformed input file; the message starts with the offending location.
class FormatError : public GameError {
 public:
  using GameError::GameError;
};

/// Malformed game structure; carries every violation found.
class ValidationError : public GameError {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : GameError(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<std::string>& v) {
    std::string msg = "invalid game structure";
    if (!v.empty()) msg += ": " + v.front();
    if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
    return msg;
  }

  std::vector<std::string> violations_;
};

}  // namespace gamemetrics
