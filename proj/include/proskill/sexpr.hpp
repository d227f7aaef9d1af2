#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proskill/diagnostic.hpp"

namespace proskill {

/// One node of the surface syntax. `[a, b]` brackets read as an Interval node
/// holding Number items; everything else is the usual symbol/number/string/list.
struct SExpr {
  enum class Kind { Symbol, Number, String, List, Interval };

  Kind kind = Kind::Symbol;
  std::string text;  // symbol name, string contents, or number spelling
  double number = 0.0;
  std::vector<SExpr> items;
  SourceLoc loc;

  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  bool is_keyword() const { return kind == Kind::Symbol && !text.empty() && text[0] == ':'; }
  bool is_list() const { return kind == Kind::List; }
  bool is_number() const { return kind == Kind::Number; }
  bool is_string() const { return kind == Kind::String; }
  bool is_atom() const { return kind != Kind::List && kind != Kind::Interval; }
};

struct SExprReadResult {
  std::vector<SExpr> forms;
  Diagnostics diagnostics;
};

/// Reads every top-level form. Comments run from ';' to end of line.
SExprReadResult read_sexprs(std::string_view source);

/// Canonical single-line rendering, used for messages.
std::string to_string(const SExpr& e);

}  // namespace proskill
