#pragma once

#include <stdexcept>
#include <string>

namespace fraccurve {

enum class ErrorKind {
    InvalidArgument,     ///< caller passed a value outside the documented range
    InvalidData,         ///< non-finite or otherwise unusable numeric input
    Parse,               ///< malformed input file
    Io,                  ///< filesystem failure
    RankDeficient,       ///< too few grid points for the requested basis
    DegenerateInput,     ///< e.g. a constant series handed to the Whittle estimator
    DegenerateSpectrum,  ///< zero eigenvalue inside an eigenvalue-ratio window
    SingularPencil,      ///< restricted B of a generalized eigenproblem is singular
    InsufficientData,    ///< sample too short for the requested statistic
    NoValidProjection,   ///< every random projection was degenerate
    TableMiss,           ///< critical-value table does not cover a requested cell
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

    /// Data problems map to exit code 2, configuration problems to 3.
    [[nodiscard]] bool is_configuration_error() const noexcept {
        return kind_ == ErrorKind::InvalidArgument || kind_ == ErrorKind::TableMiss;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace fraccurve
