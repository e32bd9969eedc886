#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gencourant {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    SyntaxError(const std::string& msg, std::size_t off)
        : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
    std::size_t offset;
};

struct UnknownSymbol : Error {
    explicit UnknownSymbol(const std::string& n) : Error("unknown symbol '" + n + "'"), name(n) {}
    std::string name;
};

struct DomainError : Error {
    DomainError(const std::string& msg, const std::string& sub)
        : Error(msg + " in '" + sub + "'"), subexpression(sub) {}
    std::string subexpression;
};

// Residual-carrying errors report the offending magnitude.
struct NotClosed : Error {
    explicit NotClosed(double m)
        : Error("3-form is not closed: max |dH| = " + std::to_string(m)), max_abs(m) {}
    double max_abs;
};

struct NotTwistedPoisson : Error {
    explicit NotTwistedPoisson(double m)
        : Error("bivector is not twisted Poisson: max residual = " + std::to_string(m)), max_abs(m) {}
    double max_abs;
};

struct CyclicConstraintViolated : Error {
    explicit CyclicConstraintViolated(double m)
        : Error("cyclic sum does not vanish: max residual = " + std::to_string(m)), max_abs(m) {}
    double max_abs;
};

#define GENCOURANT_PLAIN_ERROR(Name)     \
    struct Name : Error {                \
        using Error::Error;              \
    };

GENCOURANT_PLAIN_ERROR(ChartMismatch)
GENCOURANT_PLAIN_ERROR(SlotError)
GENCOURANT_PLAIN_ERROR(SingularMetric)
GENCOURANT_PLAIN_ERROR(DegreeMismatch)
GENCOURANT_PLAIN_ERROR(NotPositiveDefinite)
GENCOURANT_PLAIN_ERROR(NotAntisymmetric)
GENCOURANT_PLAIN_ERROR(SingularB)
GENCOURANT_PLAIN_ERROR(InvalidLieAlgebra)
GENCOURANT_PLAIN_ERROR(ParseError)
GENCOURANT_PLAIN_ERROR(ValidationError)
GENCOURANT_PLAIN_ERROR(CommandError)

#undef GENCOURANT_PLAIN_ERROR

}  // namespace gencourant
