#pragma once

#include <stdexcept>
#include <string>

namespace shiftprobe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// cipher_core
struct InvalidLetter : Error {
    using Error::Error;
};

// dataset_builder
struct EmptyVocabulary : Error {
    using Error::Error;
};
struct InsufficientCandidates : Error {
    using Error::Error;
};
struct SplitSizeMismatch : Error {
    using Error::Error;
};
struct InvalidFrequency : Error {
    using Error::Error;
};
struct ScorerUnavailable : Error {
    using Error::Error;
};
struct ScorerProtocolError : Error {
    using Error::Error;
};

// prompt_factory
struct InputDomainMismatch : Error {
    using Error::Error;
};
struct InvalidMismatch : Error {
    using Error::Error;
};

// model_backend
struct CacheMiss : Error {
    using Error::Error;
};
struct AuthMissing : Error {
    using Error::Error;
};
struct HttpError : Error {
    HttpError(int status_code, const std::string& what, double retry_after_s = -1.0)
        : Error(what), status(status_code), retry_after(retry_after_s) {}
    int status;
    double retry_after;  // seconds; < 0 when the server sent no Retry-After
};

// reasoner_sim
struct UnsupportedStyle : Error {
    using Error::Error;
};

// statfit
struct MissingPredictor : Error {
    using Error::Error;
};
struct SeparationError : Error {
    using Error::Error;
};
struct SingularDesign : Error {
    using Error::Error;
};

// cli_report / config
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace shiftprobe
