#include "fcc/parser.hpp"

#include <cctype>
#include <map>
#include <set>

#include "fcc/error.hpp"

namespace fcc {

namespace {

enum class TokenKind { Ident, Number, Symbol, End };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const std::set<std::string, std::less<>> kKeywords = {
    "semiring", "domain", "vars", "constraint", "on",  "default", "proc",
    "init",     "success", "stop", "fail",      "tell", "ask",    "par",
    "exists"};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(1);
      continue;
    }
    if (text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') bump(1);
      continue;
    }
    std::size_t start_line = line;
    std::size_t start_column = column;
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t n = 1;
      while (i + n < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i + n])) || text[i + n] == '_')) {
        ++n;
      }
      bump(n);
      tokens.push_back({TokenKind::Ident, std::string(text.substr(start, n)),
                        start_line, start_column});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 1;
      auto digits = [&] {
        while (i + n < text.size() && std::isdigit(static_cast<unsigned char>(text[i + n]))) ++n;
      };
      digits();
      if (i + n + 1 < text.size() && (text[i + n] == '.' || text[i + n] == '/') &&
          std::isdigit(static_cast<unsigned char>(text[i + n + 1]))) {
        ++n;
        digits();
      }
      bump(n);
      tokens.push_back({TokenKind::Number, std::string(text.substr(start, n)),
                        start_line, start_column});
      continue;
    }
    for (std::string_view sym : {"->", "||"}) {
      if (text.substr(i, 2) == sym) {
        bump(2);
        tokens.push_back({TokenKind::Symbol, std::string(sym), start_line, start_column});
        goto next;
      }
    }
    if (std::string_view("(){}[],;+.=").find(c) != std::string_view::npos) {
      bump(1);
      tokens.push_back({TokenKind::Symbol, std::string(1, c), start_line, start_column});
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, column);
  next:;
  }
  tokens.push_back({TokenKind::End, "", line, column});
  return tokens;
}

struct PendingCall {
  std::string name;
  std::size_t arity;
  std::size_t line;
  std::size_t column;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  Program parse() {
    Program program;
    parse_header(program);
    while (peek_is("constraint")) program.constraints.push_back(parse_constraint(program));
    std::map<std::string, const Token*> decl_sites;
    while (peek_is("proc")) {
      advance();
      const Token& name = expect_name("procedure name");
      if (decl_sites.count(name.text)) fail_at(name, "duplicate procedure '" + name.text + "'");
      decl_sites[name.text] = &name;
      Declaration decl{name.text, {}, nullptr};
      expect("(");
      if (!peek_is(")")) {
        do {
          const Token& formal = current();
          VarId v = parse_variable();
          for (VarId seen : decl.formals) {
            if (seen == v) fail_at(formal, "duplicate formal parameter '" + formal.text + "'");
          }
          decl.formals.push_back(v);
        } while (accept(","));
      }
      expect(")");
      expect("=");
      decl.body = parse_agent();
      expect(";");
      program.declarations.push_back(std::move(decl));
    }
    expect("init");
    program.main = parse_agent();
    accept(";");
    if (current().kind != TokenKind::End) fail_at(current(), "expected end of input");

    for (const auto& call : calls_) {
      const Declaration* d = program.find_declaration(call.name);
      if (!d) {
        throw ParseError("unknown procedure '" + call.name + "'", call.line, call.column);
      }
      if (d->formals.size() != call.arity) {
        throw ParseError("procedure '" + call.name + "' expects " +
                             std::to_string(d->formals.size()) + " argument(s), got " +
                             std::to_string(call.arity),
                         call.line, call.column);
      }
    }
    for (const auto& d : program.declarations) {
      std::set<VarId> formals(d.formals.begin(), d.formals.end());
      for (VarId v : free_variables(*d.body)) {
        if (!formals.count(v)) {
          fail_at(*decl_sites[d.name], "variable '" + system_->variables()[v] +
                                           "' occurs free in the body of '" + d.name +
                                           "' but is not a formal parameter");
        }
      }
    }
    return program;
  }

 private:
  const Token& current() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool peek_is(std::string_view text) const {
    return current().kind != TokenKind::End && current().kind != TokenKind::Number &&
           current().text == text;
  }
  bool accept(std::string_view text) {
    if (!peek_is(text)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail_at(const Token& t, const std::string& message) const {
    throw ParseError(message, t.line, t.column);
  }

  std::string describe(const Token& t) const {
    return t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
  }

  const Token& expect(std::string_view text) {
    if (!peek_is(text)) {
      fail_at(current(), "expected '" + std::string(text) + "', found " + describe(current()));
    }
    return advance();
  }

  const Token& expect_name(const char* what) {
    const Token& t = current();
    if (t.kind != TokenKind::Ident || kKeywords.count(t.text)) {
      fail_at(t, std::string("expected ") + what + ", found " + describe(t));
    }
    return advance();
  }

  // Domain values may be identifiers or numbers.
  const Token& expect_value() {
    const Token& t = current();
    if (t.kind != TokenKind::Ident && t.kind != TokenKind::Number) {
      fail_at(t, "expected a domain value, found " + describe(t));
    }
    return advance();
  }

  Level parse_level() {
    const Token& t = current();
    if (t.kind != TokenKind::Ident && t.kind != TokenKind::Number) {
      fail_at(t, "expected a level, found " + describe(t));
    }
    advance();
    try {
      return system_->semiring().parse_level(t.text);
    } catch (const InvalidArgument& e) {
      fail_at(t, e.what());
    }
  }

  VarId parse_variable() {
    const Token& t = expect_name("variable");
    auto v = system_->find_variable(t.text);
    if (!v) fail_at(t, "variable '" + t.text + "' is not declared in vars");
    return *v;
  }

  void parse_header(Program& program) {
    expect("semiring");
    const Token& name = expect_name("semiring name");
    const CSemiring* semiring = find_semiring(name.text);
    if (!semiring) fail_at(name, "unknown semiring '" + name.text + "'");
    expect(";");

    expect("domain");
    expect("{");
    std::vector<std::string> domain;
    std::set<std::string> seen;
    do {
      const Token& v = expect_value();
      if (!seen.insert(v.text).second) fail_at(v, "duplicate domain value '" + v.text + "'");
      domain.push_back(v.text);
    } while (accept(","));
    expect("}");
    expect(";");

    expect("vars");
    expect("{");
    std::vector<std::string> variables;
    seen.clear();
    do {
      const Token& v = expect_name("variable name");
      if (!seen.insert(v.text).second) fail_at(v, "duplicate variable '" + v.text + "'");
      variables.push_back(v.text);
    } while (accept(","));
    expect("}");
    expect(";");

    system_ = make_system(*semiring, std::move(domain), std::move(variables));
    program.system = system_;
  }

  ConstraintRef parse_constraint(const Program& program) {
    expect("constraint");
    const Token& name = expect_name("constraint name");
    if (program.find_constraint(name.text)) {
      fail_at(name, "duplicate constraint '" + name.text + "'");
    }
    expect("on");
    expect("(");
    std::vector<VarId> scope;
    if (!peek_is(")")) {
      do {
        const Token& t = current();
        VarId v = parse_variable();
        for (VarId seen : scope) {
          if (seen == v) fail_at(t, "variable '" + t.text + "' repeated in scope");
        }
        scope.push_back(v);
      } while (accept(","));
    }
    expect(")");
    std::optional<Level> fallback;
    if (accept("default")) fallback = parse_level();
    expect("{");

    std::map<std::vector<std::size_t>, Level> rows;
    if (!peek_is("}")) {
      do {
        const Token& open = expect("(");
        std::vector<std::size_t> tuple;
        while (!peek_is(")")) {
          const Token& v = expect_value();
          auto index = system_->find_value(v.text);
          if (!index) fail_at(v, "value '" + v.text + "' is not in the domain");
          tuple.push_back(*index);
        }
        expect(")");
        if (tuple.size() != scope.size()) {
          fail_at(open, "row has " + std::to_string(tuple.size()) + " value(s), scope has " +
                            std::to_string(scope.size()));
        }
        expect("->");
        Level level = parse_level();
        if (!rows.emplace(tuple, level).second) fail_at(open, "duplicate row");
      } while (accept(","));
    }
    expect("}");
    expect(";");

    std::optional<std::string> missing;
    SoftConstraint c = SoftConstraint::tabulate(
        system_, scope, [&](std::span<const std::size_t> tuple) {
          auto it = rows.find(std::vector<std::size_t>(tuple.begin(), tuple.end()));
          if (it != rows.end()) return it->second;
          if (!fallback && !missing) {
            std::string row = "(";
            for (std::size_t i = 0; i < tuple.size(); ++i) {
              row += (i > 0 ? " " : "") + system_->domain()[tuple[i]];
            }
            missing = row + ")";
          }
          return fallback.value_or(system_->semiring().zero());
        });
    if (missing) {
      fail_at(name, "constraint '" + name.text + "' has no row for " + *missing +
                        " and no default");
    }
    ConstraintRef ref{name.text, std::move(c)};
    constraints_.insert_or_assign(name.text, ref);
    return ref;
  }

  ConstraintRef parse_constraint_ref() {
    const Token& t = expect_name("constraint name");
    auto it = constraints_.find(t.text);
    if (it == constraints_.end()) fail_at(t, "unknown constraint '" + t.text + "'");
    return it->second;
  }

  Threshold parse_arrow() {
    expect("->");
    if (accept("[")) {
      Level level = parse_level();
      expect("]");
      return LevelThreshold{level};
    }
    if (accept("{")) {
      ConstraintRef phi = parse_constraint_ref();
      expect("}");
      return CutThreshold{std::move(phi)};
    }
    return NoThreshold{};
  }

  // agent := seq ("||" seq)*
  AgentPtr parse_agent() {
    AgentPtr left = parse_seq();
    while (accept("||")) left = make_par(left, parse_seq());
    return left;
  }

  // seq := askexp ("+" askexp)* | prim
  AgentPtr parse_seq() {
    if (!peek_is("ask")) return parse_prim();
    std::vector<AskBranch> branches;
    do {
      expect("ask");
      expect("(");
      ConstraintRef c = parse_constraint_ref();
      expect(")");
      Threshold threshold = parse_arrow();
      AgentPtr next = parse_seq();
      branches.push_back(AskBranch{std::move(c), std::move(threshold), std::move(next)});
    } while (accept("+"));
    return make_choice(std::move(branches));
  }

  AgentPtr parse_prim() {
    const Token& t = current();
    if (accept("success") || accept("stop")) return make_success();
    if (accept("fail")) return make_fail();
    if (accept("tell")) {
      expect("(");
      ConstraintRef c = parse_constraint_ref();
      expect(")");
      Threshold threshold = parse_arrow();
      return make_tell(std::move(c), std::move(threshold), parse_seq());
    }
    if (accept("par")) {
      expect("(");
      std::vector<AgentPtr> agents;
      do {
        agents.push_back(parse_agent());
      } while (accept(","));
      expect(")");
      return make_fair_par(std::move(agents));
    }
    if (accept("exists")) {
      VarId v = parse_variable();
      expect(".");
      return make_exists(v, parse_seq());
    }
    if (accept("(")) {
      AgentPtr inner = parse_agent();
      expect(")");
      return inner;
    }
    if (t.kind == TokenKind::Ident && !kKeywords.count(t.text)) {
      advance();
      expect("(");
      std::vector<VarId> args;
      if (!peek_is(")")) {
        do {
          args.push_back(parse_variable());
        } while (accept(","));
      }
      expect(")");
      calls_.push_back(PendingCall{t.text, args.size(), t.line, t.column});
      return make_call(t.text, std::move(args));
    }
    fail_at(t, "expected an agent, found " + describe(t));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  SystemPtr system_;
  std::map<std::string, ConstraintRef, std::less<>> constraints_;
  std::vector<PendingCall> calls_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

}  // namespace fcc
