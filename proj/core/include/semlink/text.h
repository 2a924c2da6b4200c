#ifndef SEMLINK_TEXT_H_
#define SEMLINK_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace semlink {

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view text);

// Splits on whitespace, ASCII punctuation and '_' and lowercases. Bytes
// >= 0x80 are treated as word characters so UTF-8 text stays intact.
std::vector<std::string> tokenize(std::string_view text);

// Canonical dictionary form of a word or phrase: lowercase tokens joined by
// '_' ("Rugby League" -> "rugby_league"). Empty if there are no tokens.
std::string normalize_phrase(std::string_view phrase);

// Splits an underscore-joined phrase back into its tokens.
std::vector<std::string> phrase_tokens(std::string_view phrase);

// Returns the first sentence: text up to and including the first '.', '!'
// or '?' that is followed by whitespace or the end of the text.
std::string_view first_sentence(std::string_view text);

std::string_view trim(std::string_view text);

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char delim);

}  // namespace semlink

#endif  // SEMLINK_TEXT_H_
