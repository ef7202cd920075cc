#include "fraccurve/errors.hpp"

namespace fraccurve {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::InvalidData: return "invalid-data";
        case ErrorKind::Parse: return "parse-error";
        case ErrorKind::Io: return "io-error";
        case ErrorKind::RankDeficient: return "rank-deficient";
        case ErrorKind::DegenerateInput: return "degenerate-input";
        case ErrorKind::DegenerateSpectrum: return "degenerate-spectrum";
        case ErrorKind::SingularPencil: return "singular-pencil";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::NoValidProjection: return "no-valid-projection";
        case ErrorKind::TableMiss: return "table-miss";
    }
    return "unknown";
}

}  // namespace fraccurve
