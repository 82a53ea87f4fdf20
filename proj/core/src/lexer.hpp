#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "pol/error.hpp"

namespace pol::detail {

enum class Tok {
  Ident,
  Quoted,
  Zero,
  Plus,
  Semi,
  Star,
  LParen,
  RParen,
  Lt,
  Gt,
  LBrack,
  RBrack,
  Tilde,
  Amp,
  Bar,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

  bool accept(Tok k) {
    if (cur_.kind != k) return false;
    advance();
    return true;
  }

  Token expect(Tok k, const char* what) {
    if (cur_.kind != k) fail(std::string("expected ") + what);
    return take();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::string near = cur_.kind == Tok::End ? "end of input" : "'" + cur_.text + "'";
    throw SyntaxError(msg + " near " + near, cur_.line, cur_.column);
  }

 private:
  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
    cur_ = Token{};
    cur_.line = line_;
    cur_.column = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    auto single = [&](Tok k) {
      cur_.kind = k;
      cur_.text = std::string(1, c);
      bump();
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      cur_.kind = Tok::Ident;
      cur_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (c == '"') {
      bump();
      std::string out;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) bump();
        out.push_back(src_[pos_]);
        bump();
      }
      if (pos_ >= src_.size())
        throw SyntaxError("unterminated quoted identifier", cur_.line, cur_.column);
      bump();
      cur_.kind = Tok::Quoted;
      cur_.text = std::move(out);
      return;
    }
    switch (c) {
      case '0': single(Tok::Zero); return;
      case '+': single(Tok::Plus); return;
      case ';': single(Tok::Semi); return;
      case '*': single(Tok::Star); return;
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      case '<': single(Tok::Lt); return;
      case '>': single(Tok::Gt); return;
      case '[': single(Tok::LBrack); return;
      case ']': single(Tok::RBrack); return;
      case '~': single(Tok::Tilde); return;
      case '&': single(Tok::Amp); return;
      case '|': single(Tok::Bar); return;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token cur_;
};

}  // namespace pol::detail
