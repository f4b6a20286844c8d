#pragma once

#include <stdexcept>
#include <string>

namespace psychoak {

// Base for all pipeline errors. The CLI maps categories to exit codes:
// input/schema -> 2, data processing -> 3, missing prerequisite -> 4.
enum class ErrorCategory { Input, Processing, Prerequisite, Internal };

class Error : public std::runtime_error {
public:
    Error(std::string msg, ErrorCategory cat = ErrorCategory::Processing)
        : std::runtime_error(std::move(msg)), category_(cat) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

#define PSYCHOAK_DEFINE_ERROR(Name, Cat)                                    \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(std::string msg)                                     \
            : Error(std::move(msg), ErrorCategory::Cat) {}                 \
    }

PSYCHOAK_DEFINE_ERROR(DecodeError, Input);
PSYCHOAK_DEFINE_ERROR(UnsupportedFormat, Input);
PSYCHOAK_DEFINE_ERROR(CalibrationError, Input);
PSYCHOAK_DEFINE_ERROR(InterpolationError, Processing);
PSYCHOAK_DEFINE_ERROR(CueOverlapError, Input);
PSYCHOAK_DEFINE_ERROR(CueOutOfRange, Input);
PSYCHOAK_DEFINE_ERROR(SignalTooShort, Processing);
PSYCHOAK_DEFINE_ERROR(WriteError, Processing);
PSYCHOAK_DEFINE_ERROR(EmptySeries, Processing);
PSYCHOAK_DEFINE_ERROR(DomainError, Processing);
PSYCHOAK_DEFINE_ERROR(GeometryError, Input);
PSYCHOAK_DEFINE_ERROR(VocabularyError, Input);
PSYCHOAK_DEFINE_ERROR(EmptyDataset, Processing);
PSYCHOAK_DEFINE_ERROR(IncompleteDataset, Processing);
PSYCHOAK_DEFINE_ERROR(EmptyGroup, Processing);
PSYCHOAK_DEFINE_ERROR(ShapeError, Processing);
PSYCHOAK_DEFINE_ERROR(ConvergenceError, Processing);
PSYCHOAK_DEFINE_ERROR(TrainingDiverged, Processing);
PSYCHOAK_DEFINE_ERROR(ConfigError, Input);
PSYCHOAK_DEFINE_ERROR(DatasetTooSmall, Processing);
PSYCHOAK_DEFINE_ERROR(NeedsMultipleGroups, Processing);
PSYCHOAK_DEFINE_ERROR(ManifestError, Input);
PSYCHOAK_DEFINE_ERROR(MissingPrerequisite, Prerequisite);

#undef PSYCHOAK_DEFINE_ERROR

}  // namespace psychoak
