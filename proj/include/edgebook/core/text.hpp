#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edgebook {

[[nodiscard]] std::string trim(std::string_view s);
[[nodiscard]] bool is_blank(std::string_view s);

// Trims and collapses every run of ASCII whitespace to a single space.
[[nodiscard]] std::string collapse_whitespace(std::string_view s);

// Key used for duplicate-rule detection: collapsed whitespace, ASCII lowercase.
[[nodiscard]] std::string normalize_key(std::string_view s);
[[nodiscard]] std::string rule_key(std::string_view case_description,
                                   std::string_view action);

[[nodiscard]] std::string to_lower_ascii(std::string_view s);

// Lowercased words: maximal runs of ASCII alphanumerics, '@', '_' and any
// non-ASCII byte (so UTF-8 sequences stay inside their word).
[[nodiscard]] std::vector<std::string> tokenize_words(std::string_view s);

[[nodiscard]] bool is_stopword(std::string_view word);

// FNV-1a, 64 bit.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes,
                                    std::uint64_t basis = 0xcbf29ce484222325ULL);
[[nodiscard]] std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                                    std::uint64_t basis = 0xcbf29ce484222325ULL);
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

// "YYYY-MM-DDTHH:MM:SSZ" for the current wall clock.
[[nodiscard]] std::string utc_timestamp_now();

[[nodiscard]] std::string sha256_hex(std::string_view bytes);

}  // namespace edgebook
