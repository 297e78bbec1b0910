#ifndef REVSPLIT_ERRORS_HPP
#define REVSPLIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace revsplit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unrecoverable corpus input problems (missing file, broken header, id clash).
// Per-row issues are reported, not thrown.
struct CorpusError : Error {
    using Error::Error;
};

// Invalid run or backend configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Misaligned or malformed evaluation inputs.
struct EvalError : Error {
    using Error::Error;
};

} // namespace revsplit

#endif
