#pragma once

#include "sspbound/frontend/diagnostic.hpp"

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace sspbound::frontend {

enum class TokenKind { Keyword, Identifier, Number, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string lexeme;
  SourceLoc loc;

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_symbol(std::string_view text) const { return is(TokenKind::Symbol, text); }
  bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
};

inline constexpr std::array<std::string_view, 11> kKeywords = {"while", "do",      "od",      "var",  "dist", "discrete",
                                                               "uniform", "reward", "if", "prob", "else"};

inline bool is_keyword(std::string_view word) {
  for (auto k : kKeywords)
    if (k == word) return true;
  return false;
}

/// Splits source text into tokens. `//` and `/* */` comments are dropped.
/// The choice separator is written `[]`; the box character U+25A1 is
/// accepted as a synonym.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto fail = [&](const std::string& msg) { throw DiagnosticError({Diagnostic{Severity::Error, msg, {line, col}}}); };

  while (i < src.size()) {
    const char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const SourceLoc start{line, col};
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos)
        throw DiagnosticError({Diagnostic{Severity::Error, "unterminated block comment", start}});
      advance(end + 2 - i);
      continue;
    }
    const SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string word(src.substr(i, j - i));
      out.push_back({is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, word, loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool dot = false;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || (src[j] == '.' && !dot))) {
        if (src[j] == '.') dot = true;
        ++j;
      }
      out.push_back({TokenKind::Number, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    static constexpr std::array<std::string_view, 4> two = {":=", ">=", "<=", "[]"};
    bool matched = false;
    for (auto s : two) {
      if (src.substr(i, 2) == s) {
        out.push_back({TokenKind::Symbol, std::string(s), loc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (src.substr(i, 3) == "\xE2\x96\xA1") {  // U+25A1 WHITE SQUARE
      out.push_back({TokenKind::Symbol, "[]", loc});
      advance(3);
      continue;
    }
    static constexpr std::string_view singles = "+-*/()<>{};:,=~";
    if (singles.find(ch) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, ch), loc});
      advance(1);
      continue;
    }
    fail(std::string("unexpected character '") + ch + "'");
  }
  out.push_back({TokenKind::End, "", {line, col}});
  return out;
}

}  // namespace sspbound::frontend
