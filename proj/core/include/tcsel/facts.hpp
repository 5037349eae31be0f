#pragma once

#include <string>
#include <string_view>

#include "tcsel/error.hpp"

namespace tcsel {

enum class SourceLanguage { CLike, Markup, Plain };

// Chosen from the file extension: C/C++/Java/JS-family sources are c-like,
// HTML/XML are markup, everything else is plain.
SourceLanguage language_for_path(std::string_view path);

bool is_reserved_word(std::string_view word);

// Reduces source text to its facts.
//   c-like: comment bodies, string/char literal contents and non-reserved
//           identifiers in source order. Runs of identifiers on one line are
//           space-joined; runs, comments and literals are newline-separated.
//           Reserved words are also dropped from comment and literal text.
//   markup: text content with tags and markup comments removed.
//   plain:  unchanged.
// Unterminated comments/literals consume to end of input with a warning.
std::string extract_facts(std::string_view source, SourceLanguage language,
                          Warnings* warnings = nullptr);

}  // namespace tcsel
