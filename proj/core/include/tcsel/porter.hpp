#pragma once

#include <string>
#include <string_view>

namespace tcsel {

// Porter (1980) stemmer. Words of length <= 2 and words that are not entirely
// lowercase ASCII letters are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace tcsel
