#pragma once

#include <stdexcept>
#include <string>

namespace aspectrank {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// corpus
struct IoError : Error { using Error::Error; };
struct MalformedRecord : Error { using Error::Error; };
struct DuplicateReview : Error { using Error::Error; };

// tagger
struct LengthMismatch : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };
struct EmptyTrainingSet : Error { using Error::Error; };

// opinion
struct MalformedRow : Error { using Error::Error; };
struct PolarityOutOfRange : Error { using Error::Error; };

// fuzzy
struct DomainError : Error { using Error::Error; };
struct NoApplicableRule : Error { using Error::Error; };
struct ZeroArea : Error { using Error::Error; };
struct NoOpinionWords : Error { using Error::Error; };

// rank
struct EmptyCorpus : Error { using Error::Error; };
struct UnknownEntity : Error { using Error::Error; };
struct EntitySetMismatch : Error { using Error::Error; };
struct NoAspectFound : Error { using Error::Error; };

}  // namespace aspectrank
