#pragma once

#include <stdexcept>
#include <string>

namespace gridseer {

// Coarse failure class, mapped to process exit codes by the CLI.
enum class ErrorKind {
    Runtime,       // exit 1: training diverged, I/O failure
    InvalidInput,  // exit 2: bad CSV, bad flags, schema violations
    Network,       // exit 3: registry unreachable, not found
    Verification,  // exit 4: hash mismatch
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

#define GRIDSEER_ERROR(Name, Kind)                                              \
    class Name : public Error {                                                 \
    public:                                                                     \
        explicit Name(const std::string& msg = #Name)                           \
            : Error(ErrorKind::Kind, std::string(#Name) + ": " + msg) {}        \
    }

// telemetry
GRIDSEER_ERROR(MissingHeader, InvalidInput);
GRIDSEER_ERROR(BadTimestamp, InvalidInput);
GRIDSEER_ERROR(OutOfRange, InvalidInput);
GRIDSEER_ERROR(RaggedRow, InvalidInput);
GRIDSEER_ERROR(DuplicateTimestamp, InvalidInput);
GRIDSEER_ERROR(NoRecordsForNode, InvalidInput);
GRIDSEER_ERROR(GapExceedsLimit, InvalidInput);
GRIDSEER_ERROR(SpanTooShort, InvalidInput);
GRIDSEER_ERROR(SeriesTooShort, InvalidInput);

// models
GRIDSEER_ERROR(EmptyInput, InvalidInput);
GRIDSEER_ERROR(DimensionMismatch, InvalidInput);
GRIDSEER_ERROR(NonFiniteInput, InvalidInput);
GRIDSEER_ERROR(BadWindowLength, InvalidInput);
GRIDSEER_ERROR(EmptyDataset, InvalidInput);
GRIDSEER_ERROR(DivergedToNonFinite, Runtime);
GRIDSEER_ERROR(LengthMismatch, InvalidInput);

// catalog
GRIDSEER_ERROR(MissingFeatureColumn, InvalidInput);
GRIDSEER_ERROR(SeriesShorterThanLookback, InvalidInput);
GRIDSEER_ERROR(EmptyCluster, InvalidInput);
GRIDSEER_ERROR(BadRange, InvalidInput);
GRIDSEER_ERROR(WrongInputDim, InvalidInput);
GRIDSEER_ERROR(ArchitectureMismatch, InvalidInput);
GRIDSEER_ERROR(AllZeroWeights, InvalidInput);

// bundle
GRIDSEER_ERROR(InconsistentManifest, InvalidInput);
GRIDSEER_ERROR(HashMismatch, Verification);
GRIDSEER_ERROR(UnsupportedSchemaVersion, InvalidInput);
GRIDSEER_ERROR(MalformedPayload, InvalidInput);
GRIDSEER_ERROR(MissingInputFile, InvalidInput);
GRIDSEER_ERROR(OutputNotWritable, Runtime);

// registry
GRIDSEER_ERROR(InvalidBundle, InvalidInput);
GRIDSEER_ERROR(StorageFull, Runtime);
GRIDSEER_ERROR(NotFound, Network);
GRIDSEER_ERROR(NetworkError, Network);

#undef GRIDSEER_ERROR

}  // namespace gridseer
