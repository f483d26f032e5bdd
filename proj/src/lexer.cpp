#include <array>
#include <cctype>

#include "ebx/syntax.hpp"
#include "token.hpp"

namespace ebx::tok {

namespace {

const char* kKeywords[] = {
    "CONTEXT", "EXTENDS", "SETS",       "CONSTANTS", "AXIOMS", "THEOREMS", "END",
    "MACHINE", "REFINES", "SEES",       "VARIABLES", "INVARIANTS", "VARIANT", "EVENTS",
    "STATUS",  "ANY",     "WHERE",      "WHEN",      "WITH",   "THEN",     "BEGIN",
    "skip",
};

// Word-shaped operators and builtins kept out of the identifier space.
const char* kWordOps[] = {"or", "not", "dom", "ran", "id", "card", "POW", "POW1",
                          "NAT", "INT", "true", "false"};

// Unicode alias -> canonical ASCII operator. Longest strings first.
struct Alias {
  const char* utf8;
  const char* ascii;
};
const Alias kUnicode[] = {
    {"∈", ":"},      // ∈
    {"∉", "/:"},     // ∉
    {"⊆", "<:"},     // ⊆
    {"⊂", "<<:"},    // ⊂
    {"⊈", "/<:"},    // ⊈
    {"⊄", "/<<:"},   // ⊄
    {"∪", "\\/"},    // ∪
    {"∩", "/\\"},    // ∩
    {"∖", "\\"},     // ∖
    {"×", "**"},     // ×
    {"↦", "|->"},    // ↦
    {"↔", "<->"},    // ↔
    {"⇸", "+->"},    // ⇸
    {"→", "-->"},    // →
    {"⤔", ">+>"},    // ⤔
    {"↣", ">->"},    // ↣
    {"⤀", "+->>"},   // ⤀
    {"↠", "-->>"},   // ↠
    {"⤖", ">->>"},   // ⤖
    {"◁", "<|"},     // ◁
    {"⩤", "<<|"},    // ⩤
    {"▷", "|>"},     // ▷
    {"⩥", "|>>"},    // ⩥
    {"⊗", "><"},     // ⊗
    {"∥", "||"},     // ∥
    {"∀", "!"},      // ∀
    {"∃", "#"},      // ∃
    {"⇒", "=>"},     // ⇒
    {"⇔", "<=>"},    // ⇔
    {"∧", "&"},      // ∧
    {"∨", "or"},     // ∨
    {"¬", "not"},    // ¬
    {"∅", "{}"},     // ∅
    {"≠", "/="},     // ≠
    {"≤", "<="},     // ≤
    {"≥", ">="},     // ≥
    {"≜", "="},      // ≜
    {"⊤", "true"},   // ⊤
    {"⊥", "false"},  // ⊥
    {"ℙ", "POW"},    // ℙ  (ℙ1 becomes POW followed by 1; merged below)
    {"·", "."},      // · quantifier dot
    {"∼", "~"},      // ∼
};

// Multi-character ASCII operators, longest first so the match is maximal.
const char* kOps[] = {
    "/<<:", "+->>", "-->>", ">->>", "<<|",  "<=>", "|->", "|>>", "-->", ">->", ">+>",
    "/<:",  "+->",  "<->",  "<<:",  ":=",   ":|",  "::",  "<=",  ">=",  "/=",  "/:",
    "\\/",  "/\\",  "<+",   "<|",   "|>",   "||",  "><",  "**",  "=>",  "<:",
    "{}",   "=",    "<",    ">",    "+",    "-",   "*",   "/",   "\\",  ":",   ";",
    ",",    ".",    "(",    ")",    "{",    "}",   "[",   "]",   "~",   "!",   "#",
    "&",
};

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool isClauseKeyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const SourcePos pos{line, col};

    // Unicode aliases.
    if (static_cast<unsigned char>(c) >= 0x80) {
      bool matched = false;
      for (const auto& a : kUnicode) {
        const std::size_t n = std::char_traits<char>::length(a.utf8);
        if (text.compare(i, n, a.utf8) == 0) {
          std::string ascii = a.ascii;
          if (ascii == "POW" && i + n < text.size() && text[i + n] == '1') {
            ascii = "POW1";
            advance(n + 1);
          } else {
            advance(n);
          }
          out.push_back({Kind::Op, ascii, 0, pos});
          matched = true;
          break;
        }
      }
      if (!matched) throw SyntaxError(pos, "a token", "unrecognized character");
      continue;
    }

    if (identStart(c)) {
      std::size_t j = i;
      while (j < text.size() && identChar(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      advance(j - i);
      if (i < text.size() && text[i] == '\'') {
        advance(1);
        out.push_back({Kind::PrimedIdent, word, 0, pos});
        continue;
      }
      if (isClauseKeyword(word)) {
        out.push_back({Kind::Keyword, word, 0, pos});
        continue;
      }
      bool isOp = false;
      for (const char* w : kWordOps)
        if (word == w) { isOp = true; break; }
      out.push_back({isOp ? Kind::Op : Kind::Ident, word, 0, pos});
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      Token t{Kind::Int, text.substr(i, j - i), 0, pos};
      t.intValue = std::stoll(t.text);
      advance(j - i);
      out.push_back(t);
      continue;
    }

    bool matched = false;
    for (const char* op : kOps) {
      const std::size_t n = std::char_traits<char>::length(op);
      if (text.compare(i, n, op) == 0) {
        out.push_back({Kind::Op, op, 0, pos});
        advance(n);
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(pos, "a token", std::string(1, c));
  }
  out.push_back({Kind::End, "<eof>", 0, {line, col}});
  return out;
}

}  // namespace ebx::tok
