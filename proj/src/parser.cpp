#include <map>
#include <set>

#include "ebx/syntax.hpp"
#include "token.hpp"

namespace ebx {

ExprPtr mkExpr(ExprOp op, std::vector<ExprPtr> args, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = std::move(args);
  e->pos = pos;
  return e;
}

ExprPtr mkIdent(std::string name, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::Ident;
  e->name = std::move(name);
  e->pos = pos;
  return e;
}

ExprPtr mkPrimed(std::string name, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::PrimedIdent;
  e->name = std::move(name);
  e->pos = pos;
  return e;
}

ExprPtr mkInt(long long v, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::IntLit;
  e->intValue = v;
  e->pos = pos;
  return e;
}

ExprPtr mkQuant(ExprOp op, std::vector<std::string> binds, ExprPtr body, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->binds = std::move(binds);
  e->args = {std::move(body)};
  e->pos = pos;
  return e;
}

bool equalExpr(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->name != b->name || a->intValue != b->intValue ||
      a->binds != b->binds || a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equalExpr(a->args[i], b->args[i])) return false;
  return true;
}

const EventAst* MachineAst::findEvent(const std::string& n) const {
  for (const auto& e : events)
    if (e.name == n) return &e;
  return nullptr;
}

namespace {

using tok::Kind;
using tok::Token;

struct DuplicateLabelError : SyntaxError {
  using SyntaxError::SyntaxError;
};

// Binary operator table for the Pratt expression parser. Higher binds tighter.
struct OpInfo {
  ExprOp op;
  int prec;
  bool rightAssoc;
};

const std::map<std::string, OpInfo> kRelOps = {
    {"=", {ExprOp::Eq, 0, false}},         {"/=", {ExprOp::Neq, 0, false}},
    {"<", {ExprOp::Lt, 0, false}},         {"<=", {ExprOp::Le, 0, false}},
    {">", {ExprOp::Gt, 0, false}},         {">=", {ExprOp::Ge, 0, false}},
    {":", {ExprOp::In, 0, false}},         {"/:", {ExprOp::NotIn, 0, false}},
    {"<:", {ExprOp::Subseteq, 0, false}},  {"<<:", {ExprOp::Subset, 0, false}},
    {"/<:", {ExprOp::NotSubseteq, 0, false}}, {"/<<:", {ExprOp::NotSubset, 0, false}},
};

const std::map<std::string, OpInfo> kExprOps = {
    // type-constructor arrows (loosest)
    {"<->", {ExprOp::Rel, 10, true}},   {"+->", {ExprOp::Pfun, 10, true}},
    {"-->", {ExprOp::Tfun, 10, true}},  {">+>", {ExprOp::Pinj, 10, true}},
    {">->", {ExprOp::Tinj, 10, true}},  {"+->>", {ExprOp::Psurj, 10, true}},
    {"-->>", {ExprOp::Tsurj, 10, true}},{">->>", {ExprOp::Tbij, 10, true}},
    // maplet
    {"|->", {ExprOp::Maplet, 20, false}},
    // relational operators
    {"<|", {ExprOp::DomRes, 30, false}},  {"<<|", {ExprOp::DomSub, 30, false}},
    {"|>", {ExprOp::RanRes, 30, false}},  {"|>>", {ExprOp::RanSub, 30, false}},
    {"<+", {ExprOp::Override, 30, false}},{"><", {ExprOp::Dprod, 30, false}},
    {"||", {ExprOp::Pprod, 30, false}},   {";", {ExprOp::Fcomp, 30, false}},
    // set operators
    {"\\/", {ExprOp::Union, 40, false}},  {"/\\", {ExprOp::Inter, 40, false}},
    {"\\", {ExprOp::Diff, 40, false}},
    // arithmetic
    {"+", {ExprOp::Add, 50, false}},      {"-", {ExprOp::Sub, 50, false}},
    {"*", {ExprOp::Mul, 60, false}},      {"/", {ExprOp::Div, 60, false}},
    {"**", {ExprOp::Cprod, 60, false}},
};

class Parser {
 public:
  Parser(std::vector<Token> toks, ParseOptions opts) : toks_(std::move(toks)), opts_(opts) {}

  Component parseComponent() {
    Component c;
    if (at(Kind::Keyword, "CONTEXT"))
      c.context = parseContext();
    else if (at(Kind::Keyword, "MACHINE"))
      c.machine = parseMachine();
    else
      fail("CONTEXT or MACHINE");
    expect(Kind::End);
    return c;
  }

  ExprPtr parseExpressionOnly() {
    ExprPtr e = predicate();
    expect(Kind::End);
    return e;
  }

 private:
  std::vector<Token> toks_;
  ParseOptions opts_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Kind k) const { return cur().kind == k; }
  bool at(Kind k, const std::string& t) const { return cur().kind == k && cur().text == t; }
  bool atOp(const std::string& t) const { return at(Kind::Op, t); }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(cur().pos, expected, cur().text);
  }

  Token expect(Kind k, const std::string& t = "") {
    if (cur().kind != k || (!t.empty() && cur().text != t))
      fail(t.empty() ? (k == Kind::Ident ? "identifier" : "end of input") : "'" + t + "'");
    return take();
  }

  std::string ident() { return expect(Kind::Ident).text; }

  // --- components ---

  std::vector<std::string> identList() {
    std::vector<std::string> out;
    while (at(Kind::Ident)) out.push_back(take().text);
    return out;
  }

  void checkUnique(const std::vector<Labeled>& items, const SourcePos& p) {
    std::set<std::string> seen;
    for (const auto& it : items)
      if (!seen.insert(it.label).second)
        throw DuplicateLabelError(p, "unique label", it.label);
  }

  std::vector<Labeled> labeledList(const char* autoPrefix) {
    std::vector<Labeled> out;
    int counter = 1;
    while (at(Kind::Ident) || !startsClause()) {
      if (at(Kind::Keyword) || at(Kind::End)) break;
      Labeled item;
      item.pos = cur().pos;
      if (at(Kind::Ident) && peek().kind == Kind::Op && peek().text == ":" && looksLikeLabel()) {
        item.label = take().text;
        take();  // ':'
      } else if (opts_.lenient) {
        item.label = autoPrefix + std::to_string(counter);
      } else {
        fail("label");
      }
      ++counter;
      item.pred = predicate();
      out.push_back(std::move(item));
    }
    return out;
  }

  // A leading IDENT ':' opens a labeled item unless the ':' is a membership
  // whose right side can only be read as an expression followed by another
  // label. Labels are mandatory outside lenient mode, so IDENT ':' is a label.
  bool looksLikeLabel() const { return true; }

  bool startsClause() const { return at(Kind::Keyword); }

  ContextAst parseContext() {
    ContextAst ctx;
    ctx.pos = cur().pos;
    expect(Kind::Keyword, "CONTEXT");
    ctx.name = ident();
    std::set<std::string> seenClauses;
    auto once = [&](const std::string& kw) {
      if (!seenClauses.insert(kw).second)
        throw SyntaxError(cur().pos, "single " + kw + " clause", "duplicate clause");
    };
    while (!at(Kind::Keyword, "END")) {
      if (at(Kind::Keyword, "EXTENDS")) {
        once("EXTENDS");
        take();
        ctx.extends = identList();
      } else if (at(Kind::Keyword, "SETS")) {
        once("SETS");
        take();
        ctx.sets = identList();
      } else if (at(Kind::Keyword, "CONSTANTS")) {
        once("CONSTANTS");
        take();
        ctx.constants = identList();
      } else if (at(Kind::Keyword, "AXIOMS")) {
        once("AXIOMS");
        take();
        ctx.axioms = labeledList("axm");
      } else if (at(Kind::Keyword, "THEOREMS")) {
        once("THEOREMS");
        take();
        ctx.theorems = labeledList("thm");
      } else {
        fail("a context clause");
      }
    }
    expect(Kind::Keyword, "END");
    std::vector<Labeled> all = ctx.axioms;
    all.insert(all.end(), ctx.theorems.begin(), ctx.theorems.end());
    checkUnique(all, ctx.pos);
    return ctx;
  }

  MachineAst parseMachine() {
    MachineAst m;
    m.pos = cur().pos;
    expect(Kind::Keyword, "MACHINE");
    m.name = ident();
    std::set<std::string> seenClauses;
    auto once = [&](const std::string& kw) {
      if (!seenClauses.insert(kw).second)
        throw SyntaxError(cur().pos, "single " + kw + " clause", "duplicate clause");
    };
    while (!at(Kind::Keyword, "END")) {
      if (at(Kind::Keyword, "REFINES")) {
        once("REFINES");
        take();
        m.refines = ident();
      } else if (at(Kind::Keyword, "SEES")) {
        once("SEES");
        take();
        m.sees = identList();
      } else if (at(Kind::Keyword, "VARIABLES")) {
        once("VARIABLES");
        take();
        m.variables = identList();
      } else if (at(Kind::Keyword, "INVARIANTS")) {
        once("INVARIANTS");
        take();
        m.invariants = labeledList("inv");
      } else if (at(Kind::Keyword, "THEOREMS")) {
        once("THEOREMS");
        take();
        m.theorems = labeledList("thm");
      } else if (at(Kind::Keyword, "VARIANT")) {
        once("VARIANT");
        take();
        m.variant = expression();
      } else if (at(Kind::Keyword, "EVENTS")) {
        once("EVENTS");
        take();
        while (at(Kind::Ident)) m.events.push_back(parseEvent());
      } else {
        fail("a machine clause");
      }
    }
    expect(Kind::Keyword, "END");
    std::vector<Labeled> all = m.invariants;
    all.insert(all.end(), m.theorems.begin(), m.theorems.end());
    checkUnique(all, m.pos);
    return m;
  }

  EventAst parseEvent() {
    EventAst ev;
    ev.pos = cur().pos;
    ev.name = ident();
    expect(Kind::Op, "=");
    if (at(Kind::Keyword, "STATUS")) {
      take();
      const Token st = expect(Kind::Ident);
      if (st.text == "ordinary")
        ev.status = EventStatus::Ordinary;
      else if (st.text == "convergent")
        ev.status = EventStatus::Convergent;
      else if (st.text == "anticipated")
        ev.status = EventStatus::Anticipated;
      else
        throw SyntaxError(st.pos, "ordinary, convergent or anticipated", st.text);
    }
    if (at(Kind::Keyword, "REFINES")) {
      take();
      ev.refines = identList();
    }
    if (at(Kind::Keyword, "BEGIN")) {
      take();
      ev.usesBegin = true;
      ev.actions = actionList();
      expect(Kind::Keyword, "END");
      checkEvent(ev);
      return ev;
    }
    if (at(Kind::Keyword, "ANY")) {
      take();
      ev.params = identList();
    }
    if (at(Kind::Keyword, "WHERE") || at(Kind::Keyword, "WHEN")) {
      ev.usesWhen = cur().text == "WHEN";
      if (ev.usesWhen && !ev.params.empty())
        throw SyntaxError(cur().pos, "WHERE (event has parameters)", "WHEN");
      take();
      ev.guards = labeledList("grd");
    }
    if (at(Kind::Keyword, "WITH")) {
      take();
      ev.witnesses = labeledList("wit");
    }
    if (at(Kind::Keyword, "THEN")) {
      take();
      ev.actions = actionList();
    }
    expect(Kind::Keyword, "END");
    checkEvent(ev);
    return ev;
  }

  void checkEvent(const EventAst& ev) {
    std::set<std::string> labels;
    for (const auto& g : ev.guards)
      if (!labels.insert(g.label).second)
        throw DuplicateLabelError(ev.pos, "unique label", g.label);
    std::set<std::string> actLabels;
    for (const auto& a : ev.actions)
      if (a.kind != Action::Kind::Skip && !actLabels.insert(a.label).second)
        throw DuplicateLabelError(ev.pos, "unique label", a.label);
    if (ev.name == "INITIALISATION" && (!ev.params.empty() || !ev.guards.empty()))
      throw SyntaxError(ev.pos, "INITIALISATION without parameters or guards", ev.name);
  }

  std::vector<Action> actionList() {
    std::vector<Action> out;
    int counter = 1;
    while (!at(Kind::Keyword, "END")) {
      Action a;
      a.pos = cur().pos;
      if (at(Kind::Keyword, "skip")) {
        take();
        a.kind = Action::Kind::Skip;
        a.label = "skip";
        out.push_back(std::move(a));
        ++counter;
        continue;
      }
      if (at(Kind::Ident) && peek().kind == Kind::Op && peek().text == ":") {
        a.label = take().text;
        take();  // ':'
        if (at(Kind::Keyword, "skip")) {
          take();
          a.kind = Action::Kind::Skip;
          out.push_back(std::move(a));
          ++counter;
          continue;
        }
      } else if (opts_.lenient) {
        a.label = "a" + std::to_string(counter);
      } else {
        fail("action label");
      }
      ++counter;
      a.lhs.push_back(ident());
      if (atOp("(")) {  // point update f(x) := e
        take();
        a.pointArgs.push_back(expression());
        expect(Kind::Op, ")");
        expect(Kind::Op, ":=");
        a.kind = Action::Kind::Deterministic;
        a.rhs.push_back(expression());
        out.push_back(std::move(a));
        continue;
      }
      a.pointArgs.push_back(nullptr);
      while (atOp(",")) {
        take();
        a.lhs.push_back(ident());
        a.pointArgs.push_back(nullptr);
      }
      if (atOp(":=")) {
        take();
        a.kind = Action::Kind::Deterministic;
        a.rhs.push_back(expression());
        while (atOp(",")) {
          take();
          a.rhs.push_back(expression());
        }
        if (a.rhs.size() != a.lhs.size())
          throw SyntaxError(a.pos, "as many right-hand sides as assigned variables",
                            std::to_string(a.rhs.size()));
      } else if (atOp(":|")) {
        take();
        a.kind = Action::Kind::SuchThat;
        a.predicate = predicate();
      } else if (atOp("::")) {
        take();
        if (a.lhs.size() != 1)
          throw SyntaxError(a.pos, "a single variable before ::", std::to_string(a.lhs.size()));
        a.kind = Action::Kind::MemberOf;
        a.rhs.push_back(expression());
      } else {
        fail("':=', ':|' or '::'");
      }
      out.push_back(std::move(a));
    }
    return out;
  }

  // --- expressions ---

  ExprPtr predicate() { return iffLevel(); }

  ExprPtr iffLevel() {
    ExprPtr lhs = implyLevel();
    while (atOp("<=>")) {
      const SourcePos p = take().pos;
      lhs = mkExpr(ExprOp::Iff, {lhs, implyLevel()}, p);
    }
    return lhs;
  }

  ExprPtr implyLevel() {
    ExprPtr lhs = orLevel();
    if (atOp("=>")) {
      const SourcePos p = take().pos;
      return mkExpr(ExprOp::Imply, {lhs, implyLevel()}, p);
    }
    return lhs;
  }

  ExprPtr orLevel() {
    ExprPtr lhs = andLevel();
    while (atOp("or")) {
      const SourcePos p = take().pos;
      lhs = mkExpr(ExprOp::Or, {lhs, andLevel()}, p);
    }
    return lhs;
  }

  ExprPtr andLevel() {
    ExprPtr lhs = notLevel();
    while (atOp("&")) {
      const SourcePos p = take().pos;
      lhs = mkExpr(ExprOp::And, {lhs, notLevel()}, p);
    }
    return lhs;
  }

  ExprPtr notLevel() {
    if (atOp("not")) {
      const SourcePos p = take().pos;
      return mkExpr(ExprOp::Not, {notLevel()}, p);
    }
    if (atOp("!") || atOp("#")) {
      const bool forall = cur().text == "!";
      const SourcePos p = take().pos;
      std::vector<std::string> binds;
      binds.push_back(ident());
      while (atOp(",")) {
        take();
        binds.push_back(ident());
      }
      expect(Kind::Op, ".");
      expect(Kind::Op, "(");
      ExprPtr body = predicate();
      expect(Kind::Op, ")");
      return mkQuant(forall ? ExprOp::Forall : ExprOp::Exists, std::move(binds), body, p);
    }
    return relLevel();
  }

  ExprPtr relLevel() {
    if (atOp("true")) return mkExpr(ExprOp::TrueLit, {}, take().pos);
    if (atOp("false")) return mkExpr(ExprOp::FalseLit, {}, take().pos);
    ExprPtr lhs = expression();
    if (at(Kind::Op)) {
      auto it = kRelOps.find(cur().text);
      if (it != kRelOps.end()) {
        const SourcePos p = take().pos;
        return mkExpr(it->second.op, {lhs, expression()}, p);
      }
    }
    return lhs;
  }

  ExprPtr expression() { return binary(0); }

  ExprPtr binary(int minPrec) {
    ExprPtr lhs = postfix();
    while (at(Kind::Op)) {
      auto it = kExprOps.find(cur().text);
      if (it == kExprOps.end() || it->second.prec < minPrec) break;
      const OpInfo info = it->second;
      const SourcePos p = take().pos;
      ExprPtr rhs = binary(info.rightAssoc ? info.prec : info.prec + 1);
      lhs = mkExpr(info.op, {lhs, rhs}, p);
    }
    return lhs;
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    for (;;) {
      if (atOp("~")) {
        e = mkExpr(ExprOp::Inverse, {e}, take().pos);
      } else if (atOp("[")) {
        const SourcePos p = take().pos;
        ExprPtr s = expression();
        expect(Kind::Op, "]");
        e = mkExpr(ExprOp::Image, {e, s}, p);
      } else if (atOp("(") && applicable(*e)) {
        const SourcePos p = take().pos;
        ExprPtr x = expression();
        expect(Kind::Op, ")");
        e = mkExpr(ExprOp::Apply, {e, x}, p);
      } else {
        return e;
      }
    }
  }

  // Only identifier-rooted or relational expressions may be applied; this keeps
  // `(a) (b)` from parsing as an application of a parenthesized value.
  static bool applicable(const Expr& e) {
    switch (e.op) {
      case ExprOp::Ident:
      case ExprOp::PrimedIdent:
      case ExprOp::Apply:
      case ExprOp::Inverse:
      case ExprOp::Image:
        return true;
      default:
        return false;
    }
  }

  ExprPtr unaryFn(ExprOp op) {
    const SourcePos p = take().pos;
    expect(Kind::Op, "(");
    ExprPtr a = expression();
    expect(Kind::Op, ")");
    return mkExpr(op, {a}, p);
  }

  ExprPtr atom() {
    const SourcePos p = cur().pos;
    if (at(Kind::Ident)) return mkIdent(take().text, p);
    if (at(Kind::PrimedIdent)) return mkPrimed(take().text, p);
    if (at(Kind::Int)) return mkInt(take().intValue, p);
    if (atOp("{}")) {
      take();
      return mkExpr(ExprOp::EmptySet, {}, p);
    }
    if (atOp("{")) {
      take();
      std::vector<ExprPtr> elems;
      if (!atOp("}")) {
        elems.push_back(expression());
        while (atOp(",")) {
          take();
          elems.push_back(expression());
        }
      }
      expect(Kind::Op, "}");
      if (elems.empty()) return mkExpr(ExprOp::EmptySet, {}, p);
      return mkExpr(ExprOp::SetExt, std::move(elems), p);
    }
    if (atOp("(")) {
      take();
      ExprPtr inner = predicate();
      expect(Kind::Op, ")");
      return inner;
    }
    if (atOp("dom")) return unaryFn(ExprOp::Dom);
    if (atOp("ran")) return unaryFn(ExprOp::Ran);
    if (atOp("card")) return unaryFn(ExprOp::Card);
    if (atOp("POW")) return unaryFn(ExprOp::Pow);
    if (atOp("POW1")) return unaryFn(ExprOp::Pow1);
    if (atOp("NAT")) {
      take();
      return mkExpr(ExprOp::NatSet, {}, p);
    }
    if (atOp("INT")) {
      take();
      return mkExpr(ExprOp::IntSet, {}, p);
    }
    if (atOp("true")) {
      take();
      return mkExpr(ExprOp::TrueLit, {}, p);
    }
    if (atOp("false")) {
      take();
      return mkExpr(ExprOp::FalseLit, {}, p);
    }
    if (atOp("id")) {
      take();
      if (atOp("(")) {
        take();
        ExprPtr a = expression();
        expect(Kind::Op, ")");
        return mkExpr(ExprOp::Id, {a}, p);
      }
      return mkExpr(ExprOp::IdBare, {}, p);
    }
    fail("an expression");
  }
};

}  // namespace

Component parse_component(const std::string& text, const ParseOptions& opts) {
  Parser p(tok::lex(text), opts);
  return p.parseComponent();
}

ExprPtr parse_expression(const std::string& text) {
  Parser p(tok::lex(text), ParseOptions{});
  return p.parseExpressionOnly();
}

}  // namespace ebx
