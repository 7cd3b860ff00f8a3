#include "nssubdiv/errors.hpp"

namespace nssubdiv {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonManifold: return "NonManifold";
        case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
        case ErrorCode::NonQuadFace: return "NonQuadFace";
        case ErrorCode::BoundaryUnsupported: return "BoundaryUnsupported";
        case ErrorCode::InsufficientRegularCollar: return "InsufficientRegularCollar";
        case ErrorCode::NotDivisible: return "NotDivisible";
        case ErrorCode::NonRealMask: return "NonRealMask";
        case ErrorCode::NonConstantCosetSums: return "NonConstantCosetSums";
        case ErrorCode::UnsupportedValence: return "UnsupportedValence";
        case ErrorCode::UnknownScheme: return "UnknownScheme";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::GateFailed: return "GateFailed";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::AllBelowNoiseFloor: return "AllBelowNoiseFloor";
        case ErrorCode::DefectiveSubdominant: return "DefectiveSubdominant";
        case ErrorCode::DegenerateNormals: return "DegenerateNormals";
        case ErrorCode::IncompatibleSchemes: return "IncompatibleSchemes";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace nssubdiv
