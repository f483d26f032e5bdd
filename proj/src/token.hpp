// Token stream shared by the component and expression parsers.
#pragma once

#include <string>
#include <vector>

#include "ebx/ast.hpp"

namespace ebx::tok {

enum class Kind {
  Ident,
  PrimedIdent,
  Int,
  Keyword,   // clause keywords: CONTEXT, MACHINE, WHERE, ...
  Op,        // operator tokens, canonical ASCII spelling in `text`
  End,       // end of input
};

struct Token {
  Kind kind = Kind::End;
  std::string text;
  long long intValue = 0;
  SourcePos pos;
};

// Lexes the whole input. Unicode operator aliases are normalized to their
// canonical ASCII spelling. Throws SyntaxError on unknown characters.
std::vector<Token> lex(const std::string& text);

bool isClauseKeyword(const std::string& s);

}  // namespace ebx::tok
