#pragma once

#include <stdexcept>
#include <string>

namespace omnoise {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dressed inverse susceptibility vanished at the requested frequency.
struct PoleError : Error {
    using Error::Error;
};

// Steady-state fixed point did not converge (bistability suspected).
struct ConvergenceError : Error {
    using Error::Error;
};

// cond(M) above threshold at some frequency.
struct SingularSystemError : Error {
    using Error::Error;
};

struct UnsupportedPort : Error {
    using Error::Error;
};

struct WindowTooCoarse : Error {
    using Error::Error;
};

struct InsufficientSettling : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct DegenerateWindow : Error {
    using Error::Error;
};

struct UnstableSystem : Error {
    using Error::Error;
};

struct TooShortSeries : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace omnoise
