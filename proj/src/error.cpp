#include "otkg/error.hpp"

namespace otkg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::KindConflict: return "KindConflict";
        case ErrorCode::InvalidCriticality: return "InvalidCriticality";
        case ErrorCode::InvalidNode: return "InvalidNode";
        case ErrorCode::MissingEndpoint: return "MissingEndpoint";
        case ErrorCode::KindConstraintViolation: return "KindConstraintViolation";
        case ErrorCode::GraphNotFinalized: return "GraphNotFinalized";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::BadEnum: return "BadEnum";
        case ErrorCode::BadValue: return "BadValue";
        case ErrorCode::DanglingReference: return "DanglingReference";
        case ErrorCode::NoLogsForPair: return "NoLogsForPair";
        case ErrorCode::MissingSecuredLogs: return "MissingSecuredLogs";
        case ErrorCode::DiscontiguousPath: return "DiscontiguousPath";
        case ErrorCode::EmptyGraph: return "EmptyGraph";
        case ErrorCode::SelectorEmpty: return "SelectorEmpty";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::StageOrder: return "StageOrder";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

}  // namespace otkg
