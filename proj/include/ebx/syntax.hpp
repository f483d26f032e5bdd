// Lexer, parser and pretty-printer for the .ebc / .ebm dialect.
#pragma once

#include <stdexcept>
#include <string>

#include "ebx/ast.hpp"

namespace ebx {

struct SyntaxError : std::runtime_error {
  SyntaxError(SourcePos p, const std::string& expected, const std::string& found)
      : std::runtime_error("line " + std::to_string(p.line) + ":" + std::to_string(p.column) +
                           ": expected " + expected + ", found " + found),
        pos(p) {}
  SourcePos pos;
};

struct ParseOptions {
  bool lenient = false;  // auto-generate g1../a1.. labels when missing
};

Component parse_component(const std::string& text, const ParseOptions& opts = {});
ExprPtr parse_expression(const std::string& text);

struct PrintOptions {
  bool unicode = false;  // emit Unicode operators instead of the ASCII aliases
};

std::string print_component(const Component& c, const PrintOptions& opts = {});
std::string print_expression(const ExprPtr& e, const PrintOptions& opts = {});

}  // namespace ebx
