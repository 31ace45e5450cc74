#ifndef ONEFORM_TYPES_HPP
#define ONEFORM_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oneform {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// A point in the space of time variables (t_1, ..., t_N), hbar = 1 units.
using TimePoint = std::vector<double>;

inline constexpr Complex kImag{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Named failure modes of the library surface.  Each maps to one of the
// documented error contracts; the CLI turns them into exit code 3.
struct DimMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct StepTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotUnitary : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InconsistentDerivative : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedCombination : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidMultiIndex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct TooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NegativeDuration : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct Caustic : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateComposition : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IdentityKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CausticDeterminant : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline bool all_finite(const Matrix& m) {
  return m.allFinite();
}

inline bool all_finite(const CVector& v) {
  return v.allFinite();
}

inline bool all_finite(const TimePoint& t) {
  for (double x : t)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace oneform

#endif
