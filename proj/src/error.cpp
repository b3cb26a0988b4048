#include "longdoc/error.hpp"

namespace longdoc {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::empty_document: return "EmptyDocument";
        case ErrorKind::alignment_gap: return "AlignmentGap";
        case ErrorKind::schema: return "SchemaError";
        case ErrorKind::config: return "ConfigError";
        case ErrorKind::context_overflow: return "ContextOverflow";
        case ErrorKind::backend: return "BackendFailure";
        case ErrorKind::shape_mismatch: return "ShapeMismatch";
        case ErrorKind::zero_norm: return "ZeroNorm";
        case ErrorKind::invalid_k: return "InvalidK";
        case ErrorKind::empty_gold: return "EmptyGold";
        case ErrorKind::missing_subqueries: return "MissingSubqueries";
        case ErrorKind::insufficient_points: return "InsufficientPoints";
    }
    return "Error";
}

}  // namespace longdoc
