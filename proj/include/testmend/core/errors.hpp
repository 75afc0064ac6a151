#pragma once

#include <stdexcept>
#include <string>

namespace testmend {

enum class ErrorCode {
    invalid_config,
    parse_failure,
    not_found,
    unknown_type,
    toolchain_unavailable,
    not_compiled,
    backend_exhausted,
    backend_rejected,
    replay_mismatch,
    transcript_error,
    empty_suite,
    no_code_found,
    target_mismatch,
    degenerate_sample,
    mismatched_targets,
    io_failure,
    unparseable_literal,
    opaque_oracle,
    invalid_state,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by validate_config; `field()` names the offending setting.
class InvalidConfig : public Error {
public:
    InvalidConfig(std::string field, const std::string& reason);

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ParseFailure : public Error {
public:
    explicit ParseFailure(const std::string& message) : Error(ErrorCode::parse_failure, message) {}
};

class NotFound : public Error {
public:
    explicit NotFound(const std::string& message) : Error(ErrorCode::not_found, message) {}
};

class UnknownType : public Error {
public:
    explicit UnknownType(const std::string& name)
        : Error(ErrorCode::unknown_type, "unknown type: " + name) {}
};

class ToolchainUnavailable : public Error {
public:
    explicit ToolchainUnavailable(const std::string& message)
        : Error(ErrorCode::toolchain_unavailable, message) {}
};

class NotCompiled : public Error {
public:
    explicit NotCompiled(const std::string& message) : Error(ErrorCode::not_compiled, message) {}
};

/// Transient transport failure; the gateway retries these.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BackendExhausted : public Error {
public:
    explicit BackendExhausted(const std::string& message)
        : Error(ErrorCode::backend_exhausted, message) {}
};

/// Non-retryable backend failure (bad credentials, malformed request).
class BackendRejected : public Error {
public:
    explicit BackendRejected(const std::string& message)
        : Error(ErrorCode::backend_rejected, message) {}
};

class ReplayMismatch : public Error {
public:
    ReplayMismatch(std::string expected, std::string actual);

    const std::string& expected() const noexcept { return expected_; }
    const std::string& actual() const noexcept { return actual_; }

private:
    std::string expected_;
    std::string actual_;
};

class TranscriptError : public Error {
public:
    explicit TranscriptError(const std::string& message)
        : Error(ErrorCode::transcript_error, message) {}
};

class EmptySuite : public Error {
public:
    explicit EmptySuite(const std::string& message) : Error(ErrorCode::empty_suite, message) {}
};

class NoCodeFound : public Error {
public:
    explicit NoCodeFound(const std::string& message) : Error(ErrorCode::no_code_found, message) {}
};

class TargetMismatch : public Error {
public:
    explicit TargetMismatch(const std::string& message)
        : Error(ErrorCode::target_mismatch, message) {}
};

class DegenerateSample : public Error {
public:
    explicit DegenerateSample(const std::string& message)
        : Error(ErrorCode::degenerate_sample, message) {}
};

class MismatchedTargets : public Error {
public:
    explicit MismatchedTargets(const std::string& message)
        : Error(ErrorCode::mismatched_targets, message) {}
};

class IOFailure : public Error {
public:
    explicit IOFailure(const std::string& message) : Error(ErrorCode::io_failure, message) {}
};

class UnparseableLiteral : public Error {
public:
    explicit UnparseableLiteral(const std::string& message)
        : Error(ErrorCode::unparseable_literal, message) {}
};

class OpaqueOracle : public Error {
public:
    explicit OpaqueOracle(const std::string& message) : Error(ErrorCode::opaque_oracle, message) {}
};

class InvalidState : public Error {
public:
    explicit InvalidState(const std::string& message) : Error(ErrorCode::invalid_state, message) {}
};

} // namespace testmend
