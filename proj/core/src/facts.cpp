#include "tcsel/facts.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace tcsel {
namespace {

constexpr std::array kReserved = {
    // C++20
    "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool", "break",
    "case", "catch", "char", "char8_t", "char16_t", "char32_t", "class", "compl", "concept",
    "const", "consteval", "constexpr", "constinit", "const_cast", "continue", "co_await",
    "co_return", "co_yield", "decltype", "default", "delete", "do", "double", "dynamic_cast",
    "else", "enum", "explicit", "export", "extern", "false", "float", "for", "friend", "goto",
    "if", "inline", "int", "long", "mutable", "namespace", "new", "noexcept", "not", "not_eq",
    "nullptr", "operator", "or", "or_eq", "private", "protected", "public", "register",
    "reinterpret_cast", "requires", "return", "short", "signed", "sizeof", "static",
    "static_assert", "static_cast", "struct", "switch", "template", "this", "thread_local",
    "throw", "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
    "virtual", "void", "volatile", "wchar_t", "while", "xor", "xor_eq",
    // C only
    "restrict", "_Alignas", "_Alignof", "_Atomic", "_Bool", "_Complex", "_Generic",
    "_Imaginary", "_Noreturn", "_Static_assert", "_Thread_local",
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

// Copies `text` without standalone reserved words, then trims it.
std::string scrub_reserved(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (ident_char(text[i])) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      auto word = text.substr(i, j - i);
      if (!is_reserved_word(word)) out.append(word);
      i = j;
    } else {
      out += text[i++];
    }
  }
  return std::string(trim(out));
}

class CLexer {
 public:
  CLexer(std::string_view src, Warnings* warnings) : src_(src), warnings_(warnings) {}

  std::string run() {
    bool line_start = true;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        flush_run();
        line_start = true;
        ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
        continue;
      }
      if (c == '#' && line_start) {
        line_start = false;
        directive();
        continue;
      }
      line_start = false;
      if (c == '/' && peek(1) == '/') {
        line_comment();
      } else if (c == '/' && peek(1) == '*') {
        block_comment();
      } else if (c == '"' || c == '\'') {
        quoted(c);
      } else if (digit(c) || (c == '.' && digit(peek(1)))) {
        number();
      } else if (ident_start(c)) {
        identifier();
      } else {
        ++pos_;
      }
    }
    flush_run();
    std::string out;
    for (std::size_t i = 0; i < fragments_.size(); ++i) {
      if (i != 0) out += '\n';
      out += fragments_[i];
    }
    return out;
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void warn(const std::string& what) {
    if (warnings_) warnings_->add("extract_facts: " + what + " at offset " + std::to_string(pos_));
  }

  void flush_run() {
    if (!run_.empty()) fragments_.push_back(std::move(run_));
    run_.clear();
  }

  void emit_text(std::string_view body) {
    flush_run();
    auto cleaned = scrub_reserved(body);
    if (!cleaned.empty()) fragments_.push_back(std::move(cleaned));
  }

  void line_comment() {
    std::size_t start = pos_ + 2;
    auto end = src_.find('\n', start);
    if (end == std::string_view::npos) end = src_.size();
    emit_text(src_.substr(start, end - start));
    pos_ = end;
  }

  void block_comment() {
    std::size_t start = pos_ + 2;
    auto end = src_.find("*/", start);
    if (end == std::string_view::npos) {
      warn("unterminated comment");
      emit_text(src_.substr(start));
      pos_ = src_.size();
      return;
    }
    emit_text(src_.substr(start, end - start));
    pos_ = end + 2;
  }

  // pos_ is on the opening quote.
  void quoted(char quote) {
    std::size_t start = pos_ + 1;
    std::size_t i = start;
    while (i < src_.size() && src_[i] != quote) {
      i += src_[i] == '\\' ? 2 : 1;
    }
    if (i >= src_.size()) {
      warn(quote == '"' ? "unterminated string literal" : "unterminated character literal");
      emit_text(src_.substr(start));
      pos_ = src_.size();
      return;
    }
    emit_text(src_.substr(start, i - start));
    pos_ = i + 1;
  }

  // pos_ is on the opening quote of R"delim( ... )delim".
  void raw_string() {
    std::size_t open = src_.find('(', pos_ + 1);
    if (open == std::string_view::npos) {
      warn("unterminated raw string literal");
      emit_text(src_.substr(pos_ + 1));
      pos_ = src_.size();
      return;
    }
    std::string closing = ")" + std::string(src_.substr(pos_ + 1, open - pos_ - 1)) + "\"";
    auto end = src_.find(closing, open + 1);
    if (end == std::string_view::npos) {
      warn("unterminated raw string literal");
      emit_text(src_.substr(open + 1));
      pos_ = src_.size();
      return;
    }
    emit_text(src_.substr(open + 1, end - open - 1));
    pos_ = end + closing.size();
  }

  void number() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if ((c == '+' || c == '-') && pos_ > 0) {
        char prev = src_[pos_ - 1];
        if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
          ++pos_;
          continue;
        }
        break;
      }
      if (ident_char(c) || c == '.' || (c == '\'' && ident_char(peek(1)))) {
        ++pos_;
        continue;
      }
      break;
    }
  }

  void identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    auto word = src_.substr(start, pos_ - start);
    if (peek(0) == '"' || peek(0) == '\'') {
      static constexpr std::array kPrefixes = {"L", "u", "U", "u8"};
      static constexpr std::array kRawPrefixes = {"R", "LR", "uR", "UR", "u8R"};
      if (peek(0) == '"' &&
          std::find(kRawPrefixes.begin(), kRawPrefixes.end(), word) != kRawPrefixes.end()) {
        raw_string();
        return;
      }
      if (std::find(kPrefixes.begin(), kPrefixes.end(), word) != kPrefixes.end()) {
        quoted(peek(0));
        return;
      }
    }
    if (is_reserved_word(word)) return;
    if (!run_.empty()) run_ += ' ';
    run_.append(word);
  }

  // Drops the directive name; `#include <path>` keeps the path as a literal.
  void directive() {
    ++pos_;
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    auto name = src_.substr(start, pos_ - start);
    if (name != "include") return;
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    if (peek(0) == '<') {
      auto end = src_.find_first_of(">\n", pos_ + 1);
      if (end == std::string_view::npos || src_[end] != '>') return;
      emit_text(src_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
    }
  }

  std::string_view src_;
  Warnings* warnings_;
  std::size_t pos_ = 0;
  std::string run_;
  std::vector<std::string> fragments_;
};

std::string strip_markup(std::string_view src, Warnings* warnings) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kEntities = {{
      {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&nbsp;", " "},
  }};
  std::string out;
  std::size_t i = 0;
  while (i < src.size()) {
    if (src.substr(i).starts_with("<!--")) {
      auto end = src.find("-->", i + 4);
      if (end == std::string_view::npos) {
        if (warnings) warnings->add("extract_facts: unterminated markup comment");
        break;
      }
      out += ' ';
      i = end + 3;
      continue;
    }
    if (src[i] == '<') {
      auto end = src.find('>', i + 1);
      if (end == std::string_view::npos) {
        if (warnings) warnings->add("extract_facts: unterminated tag");
        break;
      }
      out += ' ';
      i = end + 1;
      continue;
    }
    if (src[i] == '&') {
      bool replaced = false;
      for (const auto& [entity, text] : kEntities) {
        if (src.substr(i).starts_with(entity)) {
          out += text;
          i += entity.size();
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out += src[i++];
  }
  return out;
}

}  // namespace

bool is_reserved_word(std::string_view word) {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

SourceLanguage language_for_path(std::string_view path) {
  auto dot = path.rfind('.');
  auto slash = path.rfind('/');
  if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) {
    return SourceLanguage::Plain;
  }
  std::string ext(path.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  static constexpr std::array kCLike = {"c", "h", "cc", "cpp", "cxx", "c++", "hh", "hpp", "hxx",
                                        "inl", "ipp", "tcc", "java", "js", "cs", "m", "mm"};
  static constexpr std::array kMarkup = {"html", "htm", "xhtml", "xml", "xsl", "svg"};
  if (std::find(kCLike.begin(), kCLike.end(), ext) != kCLike.end()) return SourceLanguage::CLike;
  if (std::find(kMarkup.begin(), kMarkup.end(), ext) != kMarkup.end()) return SourceLanguage::Markup;
  return SourceLanguage::Plain;
}

std::string extract_facts(std::string_view source, SourceLanguage language, Warnings* warnings) {
  switch (language) {
    case SourceLanguage::CLike:
      return CLexer(source, warnings).run();
    case SourceLanguage::Markup:
      return strip_markup(source, warnings);
    case SourceLanguage::Plain:
      break;
  }
  return std::string(source);
}

}  // namespace tcsel
