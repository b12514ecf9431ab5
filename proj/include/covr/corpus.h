#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "covr/model.h"

namespace covr {

// One triplet per line. `reference` / `target` may be an object
// {id, uri, fps_hint} or a bare id string (uri defaults to the id).
nlohmann::json triplet_to_json(const Triplet& triplet);
Triplet triplet_from_json(const nlohmann::json& doc);

nlohmann::json flags_to_json(const AcceptanceFlags& flags);
AcceptanceFlags flags_from_json(const nlohmann::json& doc);

struct CorpusLineError {
  std::size_t line_number = 0;
  std::string message;
};

struct CorpusRead {
  std::vector<Triplet> triplets;
  std::vector<CorpusLineError> errors;
};

// Blank lines are skipped; bad lines are reported, not fatal.
CorpusRead parse_triplets(std::string_view text);
CorpusRead read_triplets(const std::string& path);

std::string format_triplets(const std::vector<Triplet>& triplets);
void write_triplets(const std::string& path, const std::vector<Triplet>& triplets);

}  // namespace covr
