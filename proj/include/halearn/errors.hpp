#pragma once

#include <stdexcept>
#include <string>

namespace halearn {

enum class ErrorCode {
    MissingColumn,
    NonUniformSampling,
    NonMonotonicTime,
    EmptyTrace,
    NonBinaryChannel,
    SchemaMismatch,
    DimensionMismatch,
    EmptySequence,
    EmptyState,
    TraceTooShort,
    LengthMismatch,
    Underdetermined,
    DegenerateDesign,
    EmptyTestSet,
    SchemaVersionMismatch,
    MalformedDocument,
    InvalidSpec,
    InvalidArgument,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception type. Every failure carries a stable code plus a
/// human-readable message; the C API maps codes onto integer statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace halearn
