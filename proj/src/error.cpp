#include "tsdiff/error.hpp"

namespace tsdiff {

std::string_view kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::range: return "range";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::stability: return "stability";
        case ErrorKind::pole_proximity: return "pole-proximity";
        case ErrorKind::underflow: return "underflow";
        case ErrorKind::config: return "config";
        case ErrorKind::analysis: return "analysis";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace tsdiff
