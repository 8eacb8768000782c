#pragma once

#include <stdexcept>
#include <string>

namespace seabed {

// Base class for every failure this library raises on purpose. Callers that
// want to distinguish cases catch the concrete type; the CLI maps them to
// exit codes.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

// Surface dips below bottom + depth floor somewhere.
class DepthViolation : public Error {
public:
  using Error::Error;
};

class SolverDivergence : public Error {
public:
  using Error::Error;
};

// Requested an interpolated value outside the solved fluid region.
class CurveOutsideDomain : public Error {
public:
  using Error::Error;
};

class RegionOutsideDomain : public Error {
public:
  using Error::Error;
};

// Component area below the quadrature floor; too thin to rasterize.
class DegenerateComponent : public Error {
public:
  using Error::Error;
};

// The two configurations coincide, so every comparison quantity is zero and
// ratio-based terms are undefined.
class IdenticalPair : public Error {
public:
  using Error::Error;
};

// Surface data difference too large relative to the interior difference; the
// log-log terms are not applicable.
class SmallnessViolated : public Error {
public:
  using Error::Error;
};

// Pair violates an admissibility requirement (e.g. surfaces farther apart
// than half the depth floor).
class PairIncompatible : public Error {
public:
  using Error::Error;
};

class TimeOutOfRange : public Error {
public:
  using Error::Error;
};

class WindowOutsideDomain : public Error {
public:
  using Error::Error;
};

class ZeroEnergy : public Error {
public:
  using Error::Error;
};

class PointTooNearBoundary : public Error {
public:
  using Error::Error;
};

class LineSearchFailure : public Error {
public:
  using Error::Error;
};

class InfeasibleInit : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace seabed
