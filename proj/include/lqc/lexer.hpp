#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "lqc/diag.hpp"

namespace lqc {

struct Token {
  enum class K : uint8_t { Ident, CtorIdent, Int, Sym, Keyword, Eof };
  K k = K::Eof;
  std::string text;
  long long value = 0;
  SourceLoc loc;
};

inline bool is_keyword(const std::string& s) {
  static const char* kws[] = {"let",  "letw", "in",   "case", "casew", "of",
                              "pack", "if",   "then", "else", "exists", "forall",
                              "many"};
  for (auto* k : kws)
    if (s == k) return true;
  return false;
}

class Lexer {
 public:
  explicit Lexer(std::string src) : src_(std::move(src)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) break;
      SourceLoc loc{line_, col_};
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(lex_int(loc));
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(lex_ident(loc));
      } else {
        out.push_back(lex_sym(loc));
      }
    }
    out.push_back(Token{Token::K::Eof, "", 0, SourceLoc{line_, col_}});
    return out;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      // line comments: -- ...
      if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      break;
    }
  }

  Token lex_int(SourceLoc loc) {
    long long v = 0;
    std::string text;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      v = v * 10 + (src_[pos_] - '0');
      text += src_[pos_];
      advance();
    }
    return Token{Token::K::Int, text, v, loc};
  }

  Token lex_ident(SourceLoc loc) {
    std::string s;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
        s += c;
        advance();
      } else {
        break;
      }
    }
    if (is_keyword(s)) return Token{Token::K::Keyword, s, 0, loc};
    bool ctor = std::isupper(static_cast<unsigned char>(s[0]));
    return Token{ctor ? Token::K::CtorIdent : Token::K::Ident, s, 0, loc};
  }

  Token lex_sym(SourceLoc loc) {
    // Longest-match over the fixed symbol set.
    static const char* syms[] = {"::", "->", "-o", "=o", "=>", "==", "<=", ">=",
                                 "\\", ".",  ",",  ";",  "(",  ")",  "{",  "}",
                                 "*",  "+",  "-",  "<",  ">",  "=",  "|"};
    for (auto* s : syms) {
      size_t n = std::char_traits<char>::length(s);
      if (src_.compare(pos_, n, s) == 0) {
        for (size_t i = 0; i < n; ++i) advance();
        return Token{Token::K::Sym, s, 0, loc};
      }
    }
    fail(ErrClass::ParseError, loc, std::string("unsupported character '") + src_[pos_] + "'");
  }

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

} // namespace lqc
