#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidMeshError : public Error {
public:
    using Error::Error;
};

/// Two fields (or a field and a mesh) that do not belong together.
class MeshMismatchError : public Error {
public:
    using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The constraint set of a variational problem is empty, e.g. asking for the
/// positive principal eigenvalue with a weight that is nowhere positive.
class InfeasibleConstraintError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class UndefinedQuotientError : public Error {
public:
    using Error::Error;
};

/// The linearized operator cannot be formed (zero gradient with p < 2 and no
/// regularization).
class SingularityError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Continuation found no solution at the requested parameter. Distinct from a
/// Newton failure.
class NoSolutionFoundError : public Error {
public:
    using Error::Error;
};

/// The nonlinearity is not bounded relative to φ_p, or its limits do not
/// straddle the principal eigenvalue.
class HypothesisError : public Error {
public:
    using Error::Error;
};

}  // namespace plap
