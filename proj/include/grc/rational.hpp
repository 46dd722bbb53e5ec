#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace grc {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using DynamicMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DynamicVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DynamicMatrix<Rational>;
using Vector = DynamicVector<Rational>;

/// Malformed user input (parse errors, unknown names, bad shapes).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition does not hold for otherwise well-formed data.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A postcondition guaranteed by theory failed: always a bug.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses `p`, `-p`, `p/q` with decimal integers; rejects zero denominators.
Rational parse_rational(std::string_view text);

inline std::string to_string(const Rational& q) { return q.str(); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

}  // namespace grc
