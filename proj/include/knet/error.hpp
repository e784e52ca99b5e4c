#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace knet {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised by any operation that needs an acyclic graph and finds a cycle.
class CycleError : public Error {
public:
  CycleError(std::size_t source, std::size_t target)
      : Error("cycle detected through edge " + std::to_string(source) + " -> " +
              std::to_string(target)),
        source_(source), target_(target) {}

  std::size_t source() const noexcept { return source_; }
  std::size_t target() const noexcept { return target_; }

private:
  std::size_t source_;
  std::size_t target_;
};

// Input errors that can be pinned to a line of a text source.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace knet
