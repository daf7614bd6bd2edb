#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace vsuspect {

// Canonical forms used for exact matching: dates are "YYYY-MM-DD",
// times are 24h "HH:MM".

/// Accepts "YYYY-MM-DD" and the "DD/MM/YYYY" form trainees type.
/// Returns nullopt for malformed or non-existent calendar dates.
std::optional<std::string> canonical_date(std::string_view text);

/// Accepts "HH:MM" and "H:MM".
std::optional<std::string> canonical_time(std::string_view text);

/// Lower-cased, whitespace-trimmed, inner runs of whitespace collapsed.
std::string fold_text(std::string_view text);

}  // namespace vsuspect
