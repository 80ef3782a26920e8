#pragma once

#include <stdexcept>
#include <string>

namespace hd2d {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A link endpoint lies strictly inside a blockage; the drop is physically invalid.
class EndpointCovered : public Error {
 public:
  EndpointCovered() : Error("link endpoint lies inside a blockage") {}
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(double achieved, double requested)
      : Error("quadrature did not converge: achieved relative error " + std::to_string(achieved) +
              " > requested " + std::to_string(requested)),
        achieved_(achieved),
        requested_(requested) {}
  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

 private:
  double achieved_;
  double requested_;
};

/// Combined spectrum requested before the peer profile holds W observations.
class ProfileNotFull : public Error {
 public:
  ProfileNotFull(std::size_t have, std::size_t want)
      : Error("peer profile holds " + std::to_string(have) + " of " + std::to_string(want) +
              " spectra") {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace hd2d
