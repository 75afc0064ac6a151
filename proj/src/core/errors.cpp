#include "testmend/core/errors.hpp"

namespace testmend {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::parse_failure: return "ParseFailure";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::unknown_type: return "UnknownType";
    case ErrorCode::toolchain_unavailable: return "ToolchainUnavailable";
    case ErrorCode::not_compiled: return "NotCompiled";
    case ErrorCode::backend_exhausted: return "BackendExhausted";
    case ErrorCode::backend_rejected: return "BackendRejected";
    case ErrorCode::replay_mismatch: return "ReplayMismatch";
    case ErrorCode::transcript_error: return "TranscriptError";
    case ErrorCode::empty_suite: return "EmptySuite";
    case ErrorCode::no_code_found: return "NoCodeFound";
    case ErrorCode::target_mismatch: return "TargetMismatch";
    case ErrorCode::degenerate_sample: return "DegenerateSample";
    case ErrorCode::mismatched_targets: return "MismatchedTargets";
    case ErrorCode::io_failure: return "IOFailure";
    case ErrorCode::unparseable_literal: return "UnparseableLiteral";
    case ErrorCode::opaque_oracle: return "OpaqueOracle";
    case ErrorCode::invalid_state: return "InvalidState";
    }
    return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

InvalidConfig::InvalidConfig(std::string field, const std::string& reason)
    : Error(ErrorCode::invalid_config, field + ": " + reason), field_(std::move(field)) {}

ReplayMismatch::ReplayMismatch(std::string expected, std::string actual)
    : Error(ErrorCode::replay_mismatch,
            "expected prompt fingerprint " + expected + " but pipeline sent " + actual),
      expected_(std::move(expected)), actual_(std::move(actual)) {}

} // namespace testmend
