// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spinbdg
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid construction or a field used on the wrong grid.
class GridError : public Error
{
public:
  using Error::Error;
};

/// Model parameters or constraint targets that cannot be satisfied.
class ConstraintError : public Error
{
public:
  using Error::Error;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error
{
public:
  using Error::Error;
};

/// Structural violation detected at run time (asymmetry, indefiniteness, ...).
class StructureError : public Error
{
public:
  using Error::Error;
};

/// Malformed input files or configuration text.
class FormatError : public Error
{
public:
  using Error::Error;
};

}  // namespace spinbdg
