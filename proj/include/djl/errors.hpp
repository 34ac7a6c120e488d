#pragma once

#include <stdexcept>
#include <string>

namespace djl {

// Exit-code categories used by the CLI front end.
enum class ErrorCategory {
    Io = 1,
    Arbitrage = 2,
    Density = 3,
    Quadrature = 4,
    Saddle = 5,
    MonteCarlo = 6,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

  private:
    ErrorCategory category_;
};

struct StripViolation : Error {
    explicit StripViolation(const std::string& msg)
        : Error(ErrorCategory::Quadrature, "StripViolation: " + msg) {}
};

struct NoMartingaleDrift : Error {
    explicit NoMartingaleDrift(const std::string& msg)
        : Error(ErrorCategory::Quadrature, "NoMartingaleDrift: " + msg) {}
};

struct SingularDensity : Error {
    explicit SingularDensity(const std::string& msg)
        : Error(ErrorCategory::Density, "SingularDensity: " + msg) {}
};

struct DegenerateDensity : Error {
    explicit DegenerateDensity(const std::string& msg)
        : Error(ErrorCategory::Density, "DegenerateDensity: " + msg) {}
};

struct TabulationRangeTooNarrow : Error {
    explicit TabulationRangeTooNarrow(const std::string& msg)
        : Error(ErrorCategory::Density, "TabulationRangeTooNarrow: " + msg) {}
};

struct QuadratureNotConverged : Error {
    explicit QuadratureNotConverged(const std::string& msg)
        : Error(ErrorCategory::Quadrature, "QuadratureNotConverged: " + msg) {}
};

struct ArbitrageDetected : Error {
    explicit ArbitrageDetected(const std::string& msg)
        : Error(ErrorCategory::Arbitrage, "ArbitrageDetected: " + msg) {}
};

struct BoundaryPoint : Error {
    explicit BoundaryPoint(const std::string& msg)
        : Error(ErrorCategory::Density, "BoundaryPoint: " + msg) {}
};

struct NoSaddle : Error {
    explicit NoSaddle(const std::string& msg)
        : Error(ErrorCategory::Saddle, "NoSaddle: " + msg) {}
};

struct StripExhausted : Error {
    explicit StripExhausted(const std::string& msg)
        : Error(ErrorCategory::Saddle, "StripExhausted: " + msg) {}
};

struct SaddleInUnitInterval : Error {
    explicit SaddleInUnitInterval(const std::string& msg)
        : Error(ErrorCategory::Saddle, "SaddleInUnitInterval: " + msg) {}
};

struct RegimeTooSmall : Error {
    explicit RegimeTooSmall(const std::string& msg)
        : Error(ErrorCategory::Saddle, "RegimeTooSmall: " + msg) {}
};

struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& msg)
        : Error(ErrorCategory::MonteCarlo, "NonFiniteState: " + msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg)
        : Error(ErrorCategory::Io, "IoError: " + msg) {}
};

}  // namespace djl
