#include "pinlab/error.hpp"

namespace pinlab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid-parameter";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Length: return "length";
        case ErrorKind::UnreachableConditioning: return "unreachable-conditioning";
        case ErrorKind::Budget: return "budget";
        case ErrorKind::Bracket: return "bracket";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::InfeasibleParameters: return "infeasible-parameters";
        case ErrorKind::NotFound: return "not-found";
        case ErrorKind::Config: return "config";
        case ErrorKind::Format: return "format";
    }
    return "unknown";
}

}  // namespace pinlab
