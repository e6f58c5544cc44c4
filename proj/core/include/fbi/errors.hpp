#pragma once

#include <stdexcept>
#include <string>

namespace fbi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatchError : public Error { public: using Error::Error; };
class CutoffError : public Error { public: using Error::Error; };
class SearchFailure : public Error {
 public:
  SearchFailure(const std::string& what, double achieved) : Error(what), achieved_residual(achieved) {}
  double achieved_residual;
};
class NotFlatError : public Error { public: using Error::Error; };
class DegenerateGaugeError : public Error { public: using Error::Error; };
class ConventionError : public Error { public: using Error::Error; };
class FlavorMismatchError : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class NoInvertibleShiftError : public Error { public: using Error::Error; };
class SingularStepError : public Error { public: using Error::Error; };
class DimensionCapError : public Error { public: using Error::Error; };
class ThetaSeriesError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class CacheError : public Error { public: using Error::Error; };
class ValidationFailure : public Error { public: using Error::Error; };

}  // namespace fbi
