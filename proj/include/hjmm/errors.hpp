#pragma once

#include <stdexcept>
#include <string>

namespace hjmm {

enum class ErrorKind {
    Contract,           // caller broke a precondition (dimensions, ordering)
    Domain,             // evaluation outside the declared domain
    IntegrationBlowup,  // non-finite state in the flow integrator
    NoTwist,            // shooting failed: step too long for the twist condition
    Construction,       // no admissible partition / unsupported Hamiltonian
    WindowTooSmall,     // optimizer hit the boundary of its search window
    Config,             // configuration parse or schema error
    Cfl,                // Lax-Friedrichs monotonicity condition violated
    Solver,             // aggregated solver failure
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class IntegrationBlowup : public Error {
public:
    IntegrationBlowup(double time, const std::string& what)
        : Error(ErrorKind::IntegrationBlowup, what), time_(time)
    {
    }
    double time() const noexcept { return time_; }

private:
    double time_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what)
{
    if (!condition) {
        throw Error(ErrorKind::Contract, what);
    }
}

}  // namespace hjmm
