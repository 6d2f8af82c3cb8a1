#pragma once

#include <stdexcept>
#include <string>

namespace betaint {

// Base class for every error thrown by the library. Callers that do not care
// about the precise failure mode can catch this one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A concrete matrix operation was requested for beta = 8 (octonions). Only
// closed-form evaluators accept that algebra tag.
class FormulaOnlyAlgebra : public Error {
public:
    explicit FormulaOnlyAlgebra(const std::string& msg) : Error(msg) {}
};

class InvalidBeta : public Error {
public:
    explicit InvalidBeta(const std::string& msg) : Error(msg) {}
};

class NonHermitian : public Error {
public:
    explicit NonHermitian(const std::string& msg) : Error(msg) {}
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

class SingularMinor : public Error {
public:
    explicit SingularMinor(const std::string& msg) : Error(msg) {}
};

class DegreeExceeded : public Error {
public:
    explicit DegreeExceeded(const std::string& msg) : Error(msg) {}
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& msg) : Error(msg) {}
};

class PoleParameter : public Error {
public:
    explicit PoleParameter(const std::string& msg) : Error(msg) {}
};

class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& msg, double achieved)
        : Error(msg), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

class RejectionStall : public Error {
public:
    RejectionStall(const std::string& msg, double rate)
        : Error(msg), measured_rate(rate) {}
    double measured_rate;
};

class DegenerateWeights : public Error {
public:
    DegenerateWeights(const std::string& msg, double ess)
        : Error(msg), effective_sample_size(ess) {}
    double effective_sample_size;
};

}  // namespace betaint
