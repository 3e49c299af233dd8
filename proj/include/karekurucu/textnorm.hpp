#pragma once

// Turkish-aware normalization for grid letters and word tokenization.
//
// Grid letters are the 29 uppercase letters of the Turkish alphabet. Casing
// follows the Turkish rules (i <-> İ, ı <-> I), which differ from the
// locale-independent mapping for exactly those two pairs.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "karekurucu/error.hpp"

namespace karekurucu {

namespace utf8 {

inline constexpr char32_t kReplacement = U'�';

/// Decodes UTF-8; malformed sequences become U+FFFD, one per offending byte.
inline std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(bytes[k]); };
  while (i < bytes.size()) {
    const unsigned char lead = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      out.push_back(lead);
      ++i;
      continue;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > bytes.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char cont = byte(i + k);
      if ((cont & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range values are rejected.
    static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append(std::string& out, char32_t cp) {
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

inline std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append(out, cp);
  return out;
}

inline std::string encode(char32_t cp) {
  std::string out;
  append(out, cp);
  return out;
}

}  // namespace utf8

/// The 29 uppercase Turkish letters in dictionary order.
struct TurkishAlphabet {
  static constexpr std::array<char32_t, 29> letters = {
      U'A', U'B', U'C', U'Ç', U'D', U'E', U'F', U'G', U'Ğ', U'H',
      U'I', U'İ', U'J', U'K', U'L', U'M', U'N', U'O', U'Ö', U'P',
      U'R', U'S', U'Ş', U'T', U'U', U'Ü', U'V', U'Y', U'Z'};

  /// Position in dictionary order, or -1 if not a Turkish letter.
  static constexpr int rank(char32_t cp) noexcept {
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (letters[i] == cp) return static_cast<int>(i);
    }
    return -1;
  }

  static constexpr bool contains(char32_t cp) noexcept { return rank(cp) >= 0; }
};

/// Turkish uppercase mapping, plus the circumflex fold (â→A, î→İ, û→U).
constexpr char32_t turkish_upper(char32_t cp) noexcept {
  switch (cp) {
    case U'i': return U'İ';
    case U'ı': return U'I';
    case U'ç': return U'Ç';
    case U'ğ': return U'Ğ';
    case U'ö': return U'Ö';
    case U'ş': return U'Ş';
    case U'ü': return U'Ü';
    case U'â': case U'Â': return U'A';
    case U'î': case U'Î': return U'İ';
    case U'û': case U'Û': return U'U';
    default: break;
  }
  if (cp >= U'a' && cp <= U'z') return cp - 0x20;
  return cp;
}

/// Turkish lowercase mapping (I→ı, İ→i); other Latin-1 uppercase letters map
/// to their lowercase forms.
constexpr char32_t turkish_lower(char32_t cp) noexcept {
  switch (cp) {
    case U'I': return U'ı';
    case U'İ': return U'i';
    case U'Ğ': return U'ğ';
    case U'Ş': return U'ş';
    default: break;
  }
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

inline std::string turkish_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) utf8::append(out, turkish_lower(cp));
  return out;
}

/// An uppercase word whose every letter belongs to the Turkish alphabet.
/// Only to_grid_form() constructs one from arbitrary text.
class NormalizedWord {
 public:
  NormalizedWord() = default;

  const std::u32string& letters() const noexcept { return letters_; }
  std::string text() const { return utf8::encode(letters_); }
  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  char32_t operator[](std::size_t i) const { return letters_[i]; }

  /// Dictionary (alphabet-rank) order.
  friend std::strong_ordering operator<=>(const NormalizedWord& a, const NormalizedWord& b) {
    const std::size_t n = std::min(a.letters_.size(), b.letters_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const int ra = TurkishAlphabet::rank(a.letters_[i]);
      const int rb = TurkishAlphabet::rank(b.letters_[i]);
      if (ra != rb) return ra <=> rb;
    }
    return a.letters_.size() <=> b.letters_.size();
  }
  friend bool operator==(const NormalizedWord& a, const NormalizedWord& b) = default;

 private:
  friend NormalizedWord to_grid_form(std::string_view raw);
  explicit NormalizedWord(std::u32string letters) : letters_(std::move(letters)) {}

  std::u32string letters_;
};

/// Canonical grid form of a word: Turkish uppercase, alphabet letters only.
/// Throws Error(NonAlphabetCharacter) with the code-point position and the
/// offending character; Error(InvalidRequest) on empty input.
inline NormalizedWord to_grid_form(std::string_view raw) {
  if (raw.empty()) throw Error(Errc::InvalidRequest, "empty word");
  std::u32string cps = utf8::decode(raw);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    cps[i] = turkish_upper(cps[i]);
    if (!TurkishAlphabet::contains(cps[i])) {
      throw Error(Errc::NonAlphabetCharacter,
                  "character '" + utf8::encode(cps[i]) + "' at position " + std::to_string(i) +
                      " is not a Turkish letter",
                  {{"position", i}, {"char", utf8::encode(cps[i])}});
    }
  }
  return NormalizedWord(std::move(cps));
}

/// Non-throwing variant for callers that treat rejection as a value.
inline std::optional<NormalizedWord> try_grid_form(std::string_view raw) noexcept {
  try {
    return to_grid_form(raw);
  } catch (const Error&) {
    return std::nullopt;
  }
}

namespace detail {

constexpr bool is_space(char32_t cp) noexcept {
  return cp == U' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

constexpr bool is_punct(char32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2010 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x303F) || cp == utf8::kReplacement;
}

}  // namespace detail

/// Whitespace-split word tokens, edge punctuation stripped, Turkish-lowercased.
/// Inner punctuation survives ("Dünya'nın" stays one token).
inline std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  const std::u32string cps = utf8::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && detail::is_space(cps[i])) ++i;
    std::size_t end = i;
    while (end < cps.size() && !detail::is_space(cps[end])) ++end;
    std::size_t b = i;
    std::size_t e = end;
    while (b < e && detail::is_punct(cps[b])) ++b;
    while (e > b && detail::is_punct(cps[e - 1])) --e;
    if (b < e) {
      std::string token;
      for (std::size_t k = b; k < e; ++k) utf8::append(token, turkish_lower(cps[k]));
      tokens.push_back(std::move(token));
    }
    i = end;
  }
  return tokens;
}

inline std::size_t word_count(std::string_view text) { return tokenize_words(text).size(); }

/// Grid form of `text` ignoring everything that is not a letter, used for
/// containment checks ("Ankara'nın" contains ANKARA).
inline std::u32string letters_only_upper(std::string_view text) {
  std::u32string out;
  for (char32_t cp : utf8::decode(text)) {
    const char32_t up = turkish_upper(cp);
    if (TurkishAlphabet::contains(up)) out.push_back(up);
    else if (!out.empty() && out.back() != U' ') out.push_back(U' ');
  }
  return out;
}

}  // namespace karekurucu
