#include "proskill/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace proskill {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  SExprReadResult run() {
    SExprReadResult out;
    while (true) {
      skip_space();
      if (at_end()) break;
      if (peek() == ')' || peek() == ']') {
        error(here(), std::string("unbalanced parentheses: unexpected '") + peek() + "'");
        advance();
        continue;
      }
      SExpr e;
      if (read(e)) out.forms.push_back(std::move(e));
      if (failed_) break;
    }
    out.diagnostics = std::move(diags_);
    return out;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  SourceLoc here() const { return SourceLoc{line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void error(SourceLoc loc, std::string msg) {
    diags_.push_back(Diagnostic{Severity::Error, loc, std::move(msg)});
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  static bool delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
           c == ']' || c == ';' || c == '"' || c == ',';
  }

  bool read(SExpr& out) {
    skip_space();
    if (at_end()) {
      error(here(), "unexpected end of input");
      failed_ = true;
      return false;
    }
    out.loc = here();
    char c = peek();
    if (c == '(') return read_list(out, ')', SExpr::Kind::List);
    if (c == '[') return read_list(out, ']', SExpr::Kind::Interval);
    if (c == '"') return read_string(out);
    return read_atom(out);
  }

  bool read_list(SExpr& out, char close, SExpr::Kind kind) {
    SourceLoc open = here();
    advance();
    out.kind = kind;
    while (true) {
      skip_space();
      if (at_end()) {
        error(open, "unbalanced parentheses: missing closing '" + std::string(1, close) + "'");
        failed_ = true;
        return false;
      }
      char c = peek();
      if (c == close) {
        advance();
        return true;
      }
      if (c == ')' || c == ']') {
        error(here(), std::string("unbalanced parentheses: mismatched '") + c + "'");
        failed_ = true;
        return false;
      }
      if (c == ',') {
        if (kind != SExpr::Kind::Interval) error(here(), "unexpected ','");
        advance();
        continue;
      }
      SExpr item;
      if (!read(item)) return false;
      out.items.push_back(std::move(item));
    }
  }

  bool read_string(SExpr& out) {
    SourceLoc open = here();
    advance();
    out.kind = SExpr::Kind::String;
    std::string text;
    while (true) {
      if (at_end()) {
        error(open, "unterminated string literal");
        failed_ = true;
        return false;
      }
      char c = peek();
      advance();
      if (c == '"') break;
      if (c == '\\' && !at_end()) {
        char e = peek();
        advance();
        switch (e) {
          case 'n': text.push_back('\n'); break;
          case 't': text.push_back('\t'); break;
          default: text.push_back(e); break;
        }
        continue;
      }
      text.push_back(c);
    }
    out.text = std::move(text);
    return true;
  }

  bool read_atom(SExpr& out) {
    std::size_t start = pos_;
    while (!at_end() && !delimiter(peek())) advance();
    out.text = std::string(src_.substr(start, pos_ - start));
    if (out.text.empty()) {
      error(out.loc, std::string("unexpected character '") + peek() + "'");
      advance();
      return false;
    }
    double value = 0.0;
    const char* first = out.text.data();
    const char* last = first + out.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) {
      out.kind = SExpr::Kind::Number;
      out.number = value;
    } else {
      out.kind = SExpr::Kind::Symbol;
    }
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool failed_ = false;
  Diagnostics diags_;
};

void render(const SExpr& e, std::ostringstream& out) {
  switch (e.kind) {
    case SExpr::Kind::Symbol:
    case SExpr::Kind::Number:
      out << e.text;
      break;
    case SExpr::Kind::String:
      out << '"';
      for (char c : e.text) {
        if (c == '"' || c == '\\') out << '\\';
        if (c == '\n') {
          out << "\\n";
          continue;
        }
        out << c;
      }
      out << '"';
      break;
    case SExpr::Kind::List:
    case SExpr::Kind::Interval: {
      bool list = e.kind == SExpr::Kind::List;
      out << (list ? '(' : '[');
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out << (list ? " " : ",");
        render(e.items[i], out);
      }
      out << (list ? ')' : ']');
      break;
    }
  }
}

}  // namespace

SExprReadResult read_sexprs(std::string_view source) { return Reader(source).run(); }

std::string to_string(const SExpr& e) {
  std::ostringstream out;
  render(e, out);
  return out.str();
}

}  // namespace proskill
