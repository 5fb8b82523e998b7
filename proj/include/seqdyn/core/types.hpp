#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace seqdyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Violated input contract (bad parameters, out-of-domain arguments).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value or failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw PreconditionError(what);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

} // namespace seqdyn
