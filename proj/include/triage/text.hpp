#pragma once

// UTF-8 handling and Turkish-aware character classes.

#include <string>
#include <string_view>

namespace triage::text {

/// Decodes UTF-8; malformed sequences become U+FFFD.
inline std::u32string decode(std::string_view in) {
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      out.push_back(U'�');
      ++i;
      continue;
    }
    if (i + len > in.size()) {
      out.push_back(U'�');
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(std::u32string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char32_t cp : in) append_utf8(out, cp);
  return out;
}

/// Turkish casing: I -> ı and İ -> i; everything else per Latin-1 /
/// Latin Extended-A pairs.
constexpr char32_t to_lower(char32_t c) {
  if (c == U'I') return U'ı';
  if (c == U'İ') return U'i';
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c == U'Ğ' || c == U'Ş') return c + 1;
  return c;
}

inline std::u32string to_lower(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) c = to_lower(c);
  return out;
}

inline std::string to_lower(std::string_view s) { return encode(to_lower(decode(s))); }

constexpr bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

/// Letters the tokenizer keeps: ASCII, Latin-1 and Latin Extended-A.
constexpr bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c >= 0xC0 && c <= 0xFF) return c != 0xD7 && c != 0xF7;
  return c >= 0x100 && c <= 0x17F;
}

/// Lowercase letters of the Turkish alphabet (with circumflexed vowels).
constexpr bool is_turkish_letter(char32_t c) {
  switch (c) {
    case U'ç': case U'ğ': case U'ı': case U'ö': case U'ş': case U'ü':
    case U'â': case U'î': case U'û':
      return true;
    default:
      return c >= U'a' && c <= U'z' && c != U'q' && c != U'w' && c != U'x';
  }
}

constexpr bool is_vowel(char32_t c) {
  switch (c) {
    case U'a': case U'e': case U'ı': case U'i': case U'o': case U'ö':
    case U'u': case U'ü': case U'â': case U'î': case U'û':
      return true;
    default:
      return false;
  }
}

constexpr bool is_front_vowel(char32_t c) {
  return c == U'e' || c == U'i' || c == U'ö' || c == U'ü' || c == U'î';
}

constexpr bool is_rounded_vowel(char32_t c) {
  return c == U'o' || c == U'ö' || c == U'u' || c == U'ü' || c == U'û';
}

constexpr bool is_voiceless(char32_t c) {
  switch (c) {
    case U'f': case U's': case U't': case U'k': case U'ç': case U'ş':
    case U'h': case U'p':
      return true;
    default:
      return false;
  }
}

inline bool starts_with(std::u32string_view s, std::u32string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace triage::text
