#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

#include "lexmemm/model.hpp"

namespace lexmemm {

// Binary model bundle:
//   "LEXMEMM1" | u32 version | sections
// Each section is a 4-byte tag, a u64 payload length and the payload, in the
// order CONF, TAGS, PRED, WGHT and optionally LEXI (embedded lexicon).
// Integers and doubles are little-endian; weights are row-major.
inline constexpr std::string_view kModelMagic = "LEXMEMM1";
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::size_t save_model(std::ostream& out, const TaggerModel& model);
std::size_t save_model_file(const std::string& path, const TaggerModel& model);
std::string serialize_model(const TaggerModel& model);

// Throws VersionError, TruncatedFileError, DimensionError or ModelFormatError.
// An embedded lexicon is attached; otherwise the model's lexicon is empty
// and callers attach one with attach_lexicon().
TaggerModel load_model(std::istream& in);
TaggerModel load_model_file(const std::string& path);
TaggerModel deserialize_model(std::string_view bytes);

// `predicate<TAB>tag<TAB>weight` for every non-zero weight, in id order.
void dump_weights(std::ostream& out, const TaggerModel& model);

}  // namespace lexmemm
