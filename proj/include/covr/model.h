#pragma once

#include <optional>
#include <string>

namespace covr {

struct VideoRef {
  std::string id;
  std::string uri;
  std::optional<double> fps_hint;

  friend bool operator==(const VideoRef&, const VideoRef&) = default;
};

// Throws kContract when id or uri is empty.
void validate(const VideoRef& video);

// Modification instruction; construction rejects blank text.
class EditText {
 public:
  explicit EditText(std::string text);

  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const EditText&, const EditText&) = default;

 private:
  std::string text_;
};

// Criteria (i)-(iv) are supplied by annotators or upstream heuristics;
// lexical_overlap is computed by curation::lexical_overlap.
struct AcceptanceFlags {
  bool temporal_dependency = false;
  bool state_transition = false;
  bool cinematography = false;
  bool implicit_cause_effect = false;
  double lexical_overlap = 1.0;

  friend bool operator==(const AcceptanceFlags&, const AcceptanceFlags&) = default;
};

struct Triplet {
  std::string id;
  VideoRef reference;
  EditText edit{"-"};
  VideoRef target;
  std::optional<std::string> modification_text;
  std::optional<std::string> reasoning_brief;
  std::optional<std::string> reasoning_detailed;
  AcceptanceFlags criteria_flags;
  std::optional<std::string> reference_description;
  std::optional<std::string> target_description;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

void validate(const Triplet& triplet);

}  // namespace covr
