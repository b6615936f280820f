#pragma once
// Exception types for pipeline wiring errors. Expected per-item outcomes
// (an undefined Pearson score, one failed generation in a batch) travel
// through return values instead of exceptions.

#include <stdexcept>
#include <string>

namespace bdc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// evaluation vectors / metrics
struct LengthMismatch : Error { using Error::Error; };
struct NonBinaryInput : Error { using Error::Error; };
struct MisalignedQuestions : Error { using Error::Error; };
struct MixedScoreModes : Error { using Error::Error; };
struct NoCorrectBaseline : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct PositiveLogprob : Error { using Error::Error; };

// statistics
struct TooFewPairs : Error { using Error::Error; };

// detection
struct BadK : Error { using Error::Error; };
struct TooFewShards : Error { using Error::Error; };
struct EmptyPermutations : Error { using Error::Error; };

// benchmark updates
struct NotMultipleChoice : Error { using Error::Error; };
struct ScopeViolation : Error { using Error::Error; };
struct GenerationFailure : Error { using Error::Error; };
struct ParseFailure : Error { using Error::Error; };
struct UnknownStrategy : Error { using Error::Error; };

// evaluation harness
struct EndpointError : Error { using Error::Error; };
struct MissingLogprobs : Error { using Error::Error; };
struct NoMarker : Error { using Error::Error; };
struct UnparseableNumber : Error { using Error::Error; };
struct JudgeUnparseable : Error { using Error::Error; };

// reporting
struct ModelSetMismatch : Error { using Error::Error; };
struct TooFewModels : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };

// record files / configuration
struct FormatError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace bdc
