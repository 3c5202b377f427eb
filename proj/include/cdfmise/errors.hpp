#pragma once

#include <stdexcept>
#include <string>

namespace cdfmise {

//! Argument outside the mathematical domain of an operation (nonpositive
//! scale, negative bandwidth, non-finite input).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

//! A caller violated an operation's stated precondition.
class PreconditionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! The (distribution, kernel) pair does not satisfy the assumptions an
//! operation relies on.
class UnsupportedError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

//! Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Internal invariant broken (e.g. a rejection sampler exhausting its budget).
class InternalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace cdfmise
