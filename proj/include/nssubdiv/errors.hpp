#pragma once

#include <stdexcept>
#include <string>

namespace nssubdiv {

enum class ErrorCode {
    NonManifold,
    InconsistentOrientation,
    NonQuadFace,
    BoundaryUnsupported,
    InsufficientRegularCollar,
    NotDivisible,
    NonRealMask,
    NonConstantCosetSums,
    UnsupportedValence,
    UnknownScheme,
    InvalidParameter,
    ShapeMismatch,
    SingularMatrix,
    GateFailed,
    NotConverged,
    AllBelowNoiseFloor,
    DefectiveSubdominant,
    DegenerateNormals,
    IncompatibleSchemes,
    IoError,
    ParseError,
};

const char* error_code_name(ErrorCode code);

// Library-wide exception. Every named failure mode carries a stable code so
// callers (CLI, bindings, tests) can dispatch without string matching.
class SubdivError : public std::runtime_error {
public:
    SubdivError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw SubdivError(code, what);
}

} // namespace nssubdiv
