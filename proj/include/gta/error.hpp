#pragma once

#include <stdexcept>
#include <string>

namespace gta {

// Base for every error raised by the library. The subclasses map onto the
// failure classes the navigation loop reacts to differently.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidDepthError : public Error { public: using Error::Error; };
class BoundsError : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };
class HorizonExceededError : public Error { public: using Error::Error; };
class CoverageError : public Error { public: using Error::Error; };
class GroundingError : public Error { public: using Error::Error; };
class BackendError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

}  // namespace gta
