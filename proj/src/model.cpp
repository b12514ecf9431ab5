#include "covr/model.h"

#include "covr/error.h"
#include "text_util.h"

namespace covr {

void validate(const VideoRef& video) {
  if (video.id.empty()) throw Error(ErrorCode::kContract, "video id is empty");
  if (video.uri.empty()) throw Error(ErrorCode::kContract, "video '" + video.id + "' has empty uri");
  if (video.fps_hint && !(*video.fps_hint > 0.0)) {
    throw Error(ErrorCode::kContract, "video '" + video.id + "' has non-positive fps_hint");
  }
}

EditText::EditText(std::string text) : text_(std::move(text)) {
  if (detail::trim(text_).empty()) throw Error(ErrorCode::kContract, "edit text is empty");
}

void validate(const Triplet& triplet) {
  validate(triplet.reference);
  validate(triplet.target);
  if (triplet.reference.id == triplet.target.id) {
    throw Error(ErrorCode::kContract, "triplet '" + triplet.id + "' has reference == target");
  }
  if (triplet.reasoning_detailed && triplet.reasoning_detailed->empty()) {
    throw Error(ErrorCode::kContract, "triplet '" + triplet.id + "' has empty reasoning_detailed");
  }
}

}  // namespace covr
