#include "rscm/error.hpp"

namespace rscm {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::empty_mask: return "EmptyMask";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::coincident_points: return "CoincidentPoints";
    case Errc::ineligible_instance: return "IneligibleInstance";
    case Errc::unknown_blur_kind: return "UnknownBlurKind";
    case Errc::invalid_record: return "InvalidRecord";
    case Errc::template_gap: return "TemplateGap";
    case Errc::missing_slot: return "MissingSlot";
    case Errc::empty_input: return "EmptyInput";
    case Errc::missing_qid: return "MissingQid";
    case Errc::missing_file: return "MissingFile";
    case Errc::bad_dimensions: return "BadDimensions";
    case Errc::non_binary_mask: return "NonBinaryMask";
    case Errc::bad_format: return "BadFormat";
    case Errc::io_failure: return "IoFailure";
    case Errc::parse_error: return "ParseError";
    case Errc::checksum_mismatch: return "ChecksumMismatch";
    case Errc::duplicate_triple_id: return "DuplicateTripleId";
    case Errc::unknown_triple_id: return "UnknownTripleId";
    case Errc::missing_prediction: return "MissingPrediction";
    case Errc::empty_gold: return "EmptyGold";
    case Errc::unknown_qid: return "UnknownQid";
    case Errc::basis_mismatch: return "BasisMismatch";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace rscm
