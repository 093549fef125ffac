#pragma once

#include <stdexcept>
#include <string>

namespace chatpc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Graph construction / query errors.
struct GraphError : Error {
    using Error::Error;
};
struct CycleDetected : GraphError {
    using GraphError::GraphError;
};
struct UnknownNode : GraphError {
    using GraphError::GraphError;
};
struct SelfLoop : GraphError {
    using GraphError::GraphError;
};
struct NodeSetMismatch : GraphError {
    using GraphError::GraphError;
};
struct InvalidQuery : Error {
    using Error::Error;
};

// Problem corpus errors.
struct SchemaError : Error {
    using Error::Error;
};
struct NoGroundTruth : Error {
    using Error::Error;
};
struct UnknownVariable : Error {
    using Error::Error;
};

// LLM transport errors.
struct AuthError : Error {
    using Error::Error;
};
struct TransportError : Error {
    TransportError(const std::string& msg, int attempts_made)
        : Error(msg), attempts(attempts_made) {}
    int attempts = 0;
};
struct RateLimited : Error {
    RateLimited(const std::string& msg, double retry_after_s)
        : Error(msg), retry_after(retry_after_s) {}
    double retry_after = 0.0;  // seconds; 0 when the server gave none
};
struct MalformedProviderReply : Error {
    using Error::Error;
};
struct StoreIoError : Error {
    using Error::Error;
};

// Aggregation / evaluation errors.
struct NoDecisiveAnswers : Error {
    using Error::Error;
};
struct UnknownPolicy : Error {
    using Error::Error;
};
struct MissingDirection : Error {
    using Error::Error;
};

// Data-driven CI test errors.
struct ColumnMissing : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};

// CLI errors.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace chatpc
