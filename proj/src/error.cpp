#include "covr/error.h"

#include <fstream>
#include <sstream>

#include "text_util.h"

namespace covr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kContract: return "ContractError";
    case ErrorCode::kUnknownSlot: return "UnknownSlot";
    case ErrorCode::kSlotOverflow: return "SlotOverflow";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kZeroWeightSum: return "ZeroWeightSum";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kVideoUnreadable: return "VideoUnreadable";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kAllVideosFailed: return "AllVideosFailed";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kCorruptCache: return "CorruptCache";
    case ErrorCode::kTraceUnparseable: return "TraceUnparseable";
    case ErrorCode::kEmptyOutcomes: return "EmptyOutcomes";
    case ErrorCode::kJudgeUnavailable: return "JudgeUnavailable";
    case ErrorCode::kMalformedJudgeResponse: return "MalformedJudgeResponse";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMissingTarget: return "MissingTarget";
    case ErrorCode::kMissingDescriptions: return "MissingDescriptions";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

}  // namespace detail
}  // namespace covr
