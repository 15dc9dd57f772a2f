#pragma once

#include <stdexcept>
#include <string>

namespace swflow {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SpecMismatchError : public Error {
public:
    using Error::Error;
};

class DegreeError : public Error {
public:
    using Error::Error;
};

class IllQuantizedFieldError : public Error {
public:
    using Error::Error;
};

class UndefinedRatioError : public Error {
public:
    using Error::Error;
};

// Numeric aborts raised by the optimizer. The CLI maps these to exit code 3.
class NumericAbort : public Error {
public:
    using Error::Error;
};

class SectorChangeError : public NumericAbort {
public:
    using NumericAbort::NumericAbort;
};

class NonFiniteEnergyError : public NumericAbort {
public:
    using NumericAbort::NumericAbort;
};

class PoissonSolveError : public NumericAbort {
public:
    PoissonSolveError(const std::string& what, double residual)
        : NumericAbort(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class ContractibleLoopError : public Error {
public:
    using Error::Error;
};

class SearchTooLargeError : public Error {
public:
    using Error::Error;
};

class BranchSafetyError : public Error {
public:
    using Error::Error;
};

}  // namespace swflow
