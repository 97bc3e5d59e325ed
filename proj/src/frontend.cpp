#include "gcwn/frontend.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gcwn {

namespace {

std::string position_text(const SourcePosition& pos) {
  return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column);
}

std::string expected_text(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(SourcePosition pos, std::string detail, std::vector<std::string> expected,
                       ErrorCode code)
    : Error(code, position_text(pos) + ": " + detail +
                      (expected.empty() ? "" : " (expected " + expected_text(expected) + ")")),
      pos_(pos),
      detail_(std::move(detail)),
      expected_(std::move(expected)) {}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  End,
  Ident,
  Int,
  Atom,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Colon,
  Dot,
  Define,   // :=
  Bang,     // !
  Plus,
  Minus,
  Star,
  Eq,       // =
  Ne,       // !=
  Lt,
  Le,
  AndAnd,
  OrOr,
  Bar,      // |
  Edge,     // --
  OPlus,    // (+
  Backslash,
  Slash,
};

std::string_view tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Atom: return "atom";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Define: return "':='";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bar: return "'|'";
    case Tok::Edge: return "'--'";
    case Tok::OPlus: return "'(+'";
    case Tok::Backslash: return "'\\'";
    case Tok::Slash: return "'/'";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePosition pos;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col};
    std::size_t len = 1;
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    if (ident_start(c)) {
      while (i + len < src.size() && ident_char(src[i + len])) ++len;
      while (i + len < src.size() && src[i + len] == '\'') ++len;
      t.kind = Tok::Ident;
    } else if (digit(c)) {
      while (i + len < src.size() && digit(src[i + len])) ++len;
      t.kind = Tok::Int;
    } else if (c == '\'') {
      if (i + 1 >= src.size() || !ident_start(src[i + 1])) {
        throw ParseError(t.pos, "atom name expected after quote", {});
      }
      while (i + len < src.size() && ident_char(src[i + len])) ++len;
      while (i + len < src.size() && src[i + len] == '\'') ++len;
      t.kind = Tok::Atom;
    } else if (two(':', '=')) {
      t.kind = Tok::Define, len = 2;
    } else if (two('!', '=')) {
      t.kind = Tok::Ne, len = 2;
    } else if (two('<', '=')) {
      t.kind = Tok::Le, len = 2;
    } else if (two('&', '&')) {
      t.kind = Tok::AndAnd, len = 2;
    } else if (two('|', '|')) {
      t.kind = Tok::OrOr, len = 2;
    } else if (two('-', '-')) {
      t.kind = Tok::Edge, len = 2;
    } else if (two('(', '+')) {
      t.kind = Tok::OPlus, len = 2;
    } else {
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case ',': t.kind = Tok::Comma; break;
        case ';': t.kind = Tok::Semi; break;
        case ':': t.kind = Tok::Colon; break;
        case '.': t.kind = Tok::Dot; break;
        case '!': t.kind = Tok::Bang; break;
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '=': t.kind = Tok::Eq; break;
        case '<': t.kind = Tok::Lt; break;
        case '|': t.kind = Tok::Bar; break;
        case '\\': t.kind = Tok::Backslash; break;
        case '/': t.kind = Tok::Slash; break;
        default: {
          std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                  ? "byte " + std::to_string(static_cast<unsigned char>(c))
                                  : "'" + std::string(1, c) + "'";
          throw ParseError(t.pos, "unexpected character " + shown, {});
        }
      }
    }
    t.text = std::string(src.substr(i, len));
    advance(len);
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Network expressions, resolved once all definitions are known

struct NetExpr {
  enum class Kind { Ref, Block, LinkAll, Compose, Restrict };
  Kind kind = Kind::Block;
  SourcePosition pos;
  std::string name;
  Network block;
  std::vector<LocPair> links;
  std::vector<Channel> channels;
  std::vector<std::unique_ptr<NetExpr>> children;
};

constexpr std::size_t kMaxNesting = 200;

const std::set<std::string, std::less<>> kKeywords = {
    "if", "then", "else", "true", "false", "net", "nodes", "edges", "restrict", "universe",
    "import"};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  SourceModel run() {
    std::vector<std::pair<std::string, std::unique_ptr<NetExpr>>> nets;
    std::set<std::string> net_names;
    std::set<std::string> def_names;
    while (!at(Tok::End)) {
      if (keyword("net")) {
        next();
        const Token name = expect_ident("network name");
        if (!net_names.insert(name.text).second) {
          throw ParseError(name.pos, "network " + name.text + " declared twice", {});
        }
        std::unique_ptr<NetExpr> e;
        if (accept(Tok::Eq)) {
          e = parse_net_expr();
          expect(Tok::Semi);
        } else {
          e = parse_block();
        }
        nets.emplace_back(name.text, std::move(e));
      } else if (keyword("universe")) {
        const Token kw = next();
        if (model_.universe) throw ParseError(kw.pos, "universe declared twice", {});
        expect(Tok::LBrace);
        std::vector<Value> vals;
        if (!accept(Tok::RBrace)) {
          do {
            const SourcePosition pos = peek().pos;
            Expr e = parse_expr();
            try {
              vals.push_back(eval(e));
            } catch (const Error& err) {
              throw ParseError(pos, std::string("universe value: ") + err.what(), {});
            }
          } while (accept(Tok::Comma));
          expect(Tok::RBrace);
        }
        model_.universe = std::move(vals);
      } else if (keyword("import")) {
        next();
        do {
          model_.imports.push_back(expect_ident("primitive name").text);
        } while (accept(Tok::Comma));
        expect(Tok::Semi);
      } else if (at(Tok::Ident)) {
        const Token name = expect_ident("definition name");
        if (!def_names.insert(name.text).second) {
          throw ParseError(name.pos, "constant " + name.text + " defined twice", {});
        }
        Definition def;
        def.name = name.text;
        if (accept(Tok::LParen)) {
          if (!accept(Tok::RParen)) {
            do {
              def.params.push_back(expect_ident("parameter").text);
            } while (accept(Tok::Comma));
            expect(Tok::RParen);
          }
        }
        expect(Tok::Define);
        def.body = parse_proc();
        expect(Tok::Semi);
        model_.definitions.push_back(std::move(def));
      } else {
        expected_.insert("'net'");
        expected_.insert("'universe'");
        expected_.insert("'import'");
        expected_.insert(std::string(tok_name(Tok::Ident)));
        fail();
      }
    }
    env_ = model_.environment();
    for (auto& [name, e] : nets) {
      model_.networks.push_back({name, resolve(*e)});
    }
    return std::move(model_);
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok t) {
    expected_.insert(std::string(tok_name(t)));
    return peek().kind == t;
  }
  bool keyword(std::string_view kw) {
    expected_.insert("'" + std::string(kw) + "'");
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  Token next() {
    expected_.clear();
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok t) {
    if (!at(t)) return false;
    next();
    return true;
  }
  Token expect(Tok t) {
    if (!at(t)) fail();
    return next();
  }
  Token expect_ident(std::string_view what) {
    if (!at(Tok::Ident)) fail();
    if (kKeywords.count(peek().text)) {
      throw ParseError(peek().pos, "keyword '" + peek().text + "' cannot be used as " +
                                       std::string(what), {});
    }
    return next();
  }
  [[noreturn]] void fail() {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos, "unexpected " + found,
                     std::vector<std::string>(expected_.begin(), expected_.end()));
  }

  struct Depth {
    explicit Depth(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) {
        throw ParseError(p_.peek().pos, "nesting deeper than " + std::to_string(kMaxNesting), {});
      }
    }
    ~Depth() { --p_.depth_; }
    Parser& p_;
  };

  // -- processes ------------------------------------------------------------

  Process parse_proc() {
    Depth d(*this);
    Process lhs = parse_sumterm();
    while (accept(Tok::Plus)) lhs = proc::sum(lhs, parse_sumterm());
    return lhs;
  }

  Process parse_sumterm() {
    Depth d(*this);
    if (at(Tok::Int)) {
      const Token t = peek();
      if (t.text != "0") throw ParseError(t.pos, "only 0 denotes a process", {});
      next();
      return proc::nil();
    }
    if (accept(Tok::LParen)) {
      Process p = parse_proc();
      expect(Tok::RParen);
      return p;
    }
    if (keyword("if")) {
      next();
      Expr cond = parse_expr();
      if (!keyword("then")) fail();
      next();
      Process a = parse_sumterm();
      if (!keyword("else")) fail();
      next();
      Process b = parse_sumterm();
      return proc::ite(std::move(cond), std::move(a), std::move(b));
    }
    const Token name = expect_ident("channel or constant");
    if (accept(Tok::Bang)) {
      expect(Tok::LParen);
      std::vector<Expr> items;
      do {
        items.push_back(parse_expr());
      } while (accept(Tok::Comma));
      expect(Tok::RParen);
      expect(Tok::Dot);
      Expr payload = items.size() == 1 ? items[0] : expr::tuple(std::move(items));
      return proc::output(Channel(name.text), std::move(payload), parse_sumterm());
    }
    if (peek().kind == Tok::LParen && peek(1).kind == Tok::Ident && peek(2).kind == Tok::RParen &&
        peek(3).kind == Tok::Dot && !kKeywords.count(peek(1).text)) {
      next();
      const Token x = next();
      next();
      next();
      return proc::input(Channel(name.text), x.text, parse_sumterm());
    }
    std::vector<Expr> args;
    if (accept(Tok::LParen)) {
      if (!accept(Tok::RParen)) {
        do {
          args.push_back(parse_expr());
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
      }
    }
    ChannelMap relabel;
    if (accept(Tok::LBracket)) {
      std::set<std::string> seen;
      do {
        const Token to = expect_ident("channel");
        expect(Tok::Slash);
        const Token from = expect_ident("channel");
        if (!seen.insert(from.text).second) {
          throw ParseError(from.pos, "channel " + from.text + " renamed twice", {});
        }
        relabel.emplace_back(Channel(from.text), Channel(to.text));
      } while (accept(Tok::Comma));
      expect(Tok::RBracket);
    }
    return proc::call(name.text, std::move(args), std::move(relabel));
  }

  // -- expressions ----------------------------------------------------------

  Expr parse_expr() { return parse_level(1); }

  Expr parse_level(int level) {
    Depth d(*this);
    switch (level) {
      case 1: {
        Expr lhs = parse_level(2);
        while (accept(Tok::OrOr)) lhs = expr::binary(Op::Or, lhs, parse_level(2));
        return lhs;
      }
      case 2: {
        Expr lhs = parse_level(3);
        while (accept(Tok::AndAnd)) lhs = expr::binary(Op::And, lhs, parse_level(3));
        return lhs;
      }
      case 3:
        if (accept(Tok::Bang)) return expr::unary(Op::Not, parse_level(3));
        return parse_level(4);
      case 4: {
        Expr lhs = parse_level(5);
        std::optional<Op> op;
        if (accept(Tok::Eq)) op = Op::Eq;
        else if (accept(Tok::Ne)) op = Op::Ne;
        else if (accept(Tok::Lt)) op = Op::Lt;
        else if (accept(Tok::Le)) op = Op::Le;
        if (!op) return lhs;
        return expr::binary(*op, lhs, parse_level(5));
      }
      case 5: {
        Expr lhs = parse_level(6);
        for (;;) {
          if (accept(Tok::Plus)) lhs = expr::binary(Op::Add, lhs, parse_level(6));
          else if (accept(Tok::Minus)) lhs = expr::binary(Op::Sub, lhs, parse_level(6));
          else return lhs;
        }
      }
      case 6: {
        Expr lhs = parse_primary();
        while (accept(Tok::Star)) lhs = expr::binary(Op::Mul, lhs, parse_primary());
        return lhs;
      }
    }
    return parse_primary();
  }

  Expr parse_int(bool negative) {
    const Token t = expect(Tok::Int);
    const std::string text = (negative ? "-" : "") + t.text;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError(t.pos, "integer literal out of range", {});
    }
    return expr::integer(v);
  }

  std::vector<Expr> parse_items(Tok close) {
    std::vector<Expr> items;
    if (accept(close)) return items;
    do {
      items.push_back(parse_expr());
    } while (accept(Tok::Comma));
    expect(close);
    return items;
  }

  Expr parse_primary() {
    Depth d(*this);
    if (at(Tok::Int)) return parse_int(false);
    if (accept(Tok::Minus)) return parse_int(true);
    if (at(Tok::Atom)) return expr::atom(next().text.substr(1));
    if (keyword("true")) {
      next();
      return expr::boolean(true);
    }
    if (keyword("false")) {
      next();
      return expr::boolean(false);
    }
    if (accept(Tok::LBracket)) return expr::list(parse_items(Tok::RBracket));
    if (accept(Tok::LParen)) {
      if (accept(Tok::RParen)) return expr::tuple({});
      Expr first = parse_expr();
      if (accept(Tok::RParen)) return first;
      expect(Tok::Comma);
      std::vector<Expr> items{first};
      if (!accept(Tok::RParen)) {
        do {
          items.push_back(parse_expr());
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
      }
      return expr::tuple(std::move(items));
    }
    const Token name = expect_ident("variable or primitive");
    if (accept(Tok::LParen)) return expr::prim(name.text, parse_items(Tok::RParen));
    return expr::var(name.text);
  }

  // -- networks -------------------------------------------------------------

  Location parse_location() {
    if (at(Tok::Int)) return Location(next().text);
    return Location(expect_ident("location").text);
  }

  std::unique_ptr<NetExpr> parse_block() {
    auto out = std::make_unique<NetExpr>();
    out->kind = NetExpr::Kind::Block;
    out->pos = expect(Tok::LBrace).pos;
    std::vector<Location> locs;
    std::map<Location, Process> nodes;
    std::vector<LocPair> edges;
    std::vector<Channel> restricted;
    if (keyword("nodes")) {
      next();
      expect(Tok::LBrace);
      while (!accept(Tok::RBrace)) {
        const SourcePosition pos = peek().pos;
        Location p = parse_location();
        expect(Tok::Colon);
        Process body = parse_proc();
        expect(Tok::Semi);
        if (!nodes.emplace(p, body).second) {
          throw ParseError(pos, "location " + p.name + " assigned twice", {});
        }
        locs.push_back(p);
      }
    }
    if (keyword("edges")) {
      next();
      expect(Tok::LBrace);
      while (!accept(Tok::RBrace)) {
        Location a = parse_location();
        expect(Tok::Edge);
        Location b = parse_location();
        expect(Tok::Semi);
        edges.push_back(edge(a, b));
      }
    }
    if (keyword("restrict")) {
      next();
      expect(Tok::LBrace);
      if (!accept(Tok::RBrace)) {
        do {
          restricted.emplace_back(expect_ident("channel").text);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
      }
    }
    expect(Tok::RBrace);
    out->block.topology = Topology::make(std::move(locs), std::move(edges));
    out->block.assignment = std::move(nodes);
    out->block.restricted = std::move(restricted);
    return out;
  }

  std::unique_ptr<NetExpr> parse_net_expr() {
    Depth d(*this);
    auto lhs = parse_net_postfix();
    for (;;) {
      auto node = std::make_unique<NetExpr>();
      node->pos = peek().pos;
      if (accept(Tok::Bar)) {
        node->kind = NetExpr::Kind::LinkAll;
      } else if (accept(Tok::OPlus)) {
        node->kind = NetExpr::Kind::Compose;
        if (accept(Tok::LBrace)) {
          if (!accept(Tok::RBrace)) {
            do {
              expect(Tok::LParen);
              Location a = parse_location();
              expect(Tok::Comma);
              Location b = parse_location();
              expect(Tok::RParen);
              node->links.emplace_back(a, b);
            } while (accept(Tok::Comma));
            expect(Tok::RBrace);
          }
        }
        expect(Tok::RParen);
      } else {
        return lhs;
      }
      node->children.push_back(std::move(lhs));
      node->children.push_back(parse_net_postfix());
      lhs = std::move(node);
    }
  }

  std::unique_ptr<NetExpr> parse_net_postfix() {
    Depth d(*this);
    std::unique_ptr<NetExpr> base;
    if (at(Tok::LBrace)) {
      base = parse_block();
    } else if (accept(Tok::LParen)) {
      base = parse_net_expr();
      expect(Tok::RParen);
    } else {
      base = std::make_unique<NetExpr>();
      base->kind = NetExpr::Kind::Ref;
      base->pos = peek().pos;
      base->name = expect_ident("network name").text;
    }
    while (at(Tok::Backslash)) {
      auto node = std::make_unique<NetExpr>();
      node->kind = NetExpr::Kind::Restrict;
      node->pos = next().pos;
      expect(Tok::LBrace);
      if (!accept(Tok::RBrace)) {
        do {
          node->channels.emplace_back(expect_ident("channel").text);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
      }
      node->children.push_back(std::move(base));
      base = std::move(node);
    }
    return base;
  }

  Network resolve(const NetExpr& e) {
    try {
      switch (e.kind) {
        case NetExpr::Kind::Block: return e.block;
        case NetExpr::Kind::Ref: {
          const Network* n = model_.find_network(e.name);
          if (!n) {
            throw ParseError(e.pos, "network " + e.name + " is not declared before use", {},
                             ErrorCode::UnknownNetwork);
          }
          return *n;
        }
        case NetExpr::Kind::LinkAll:
          return network_link_all(resolve(*e.children[0]), resolve(*e.children[1]), env_);
        case NetExpr::Kind::Compose:
          return network_compose(resolve(*e.children[0]), resolve(*e.children[1]), e.links, env_);
        case NetExpr::Kind::Restrict: return network_restrict(resolve(*e.children[0]), e.channels);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      throw ParseError(e.pos, err.what(), {}, err.code());
    }
    return {};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
  std::set<std::string> expected_;
  SourceModel model_;
  Environment env_;
};

void print_values(std::string& out, const std::vector<Value>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ", ";
    out += to_string(vals[i]);
  }
}

bool same_network(const Network& a, const Network& b) {
  if (!(a.topology == b.topology) || a.restricted.size() != b.restricted.size() ||
      a.assignment.size() != b.assignment.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.restricted.size(); ++i) {
    if (a.restricted[i] != b.restricted[i]) return false;
  }
  for (auto ia = a.assignment.begin(), ib = b.assignment.begin(); ia != a.assignment.end();
       ++ia, ++ib) {
    if (ia->first != ib->first || !same(ia->second, ib->second)) return false;
  }
  return true;
}

}  // namespace

Environment SourceModel::environment() const { return Environment(definitions); }

const Network* SourceModel::find_network(std::string_view name) const {
  for (const auto& d : networks) {
    if (d.name == name) return &d.network;
  }
  return nullptr;
}

std::vector<Value> SourceModel::payloads() const {
  if (universe) return *universe;
  std::set<Value> lits;
  for (const auto& d : definitions) collect_literals(d.body, lits);
  for (const auto& n : networks) collect_literals(n.network, lits);
  return {lits.begin(), lits.end()};
}

SourceModel parse(std::string_view text) { return Parser(text).run(); }

SourceModel load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string print_network(const std::string& name, const Network& n) {
  std::string out = "net " + name + " {\n  nodes {\n";
  for (const auto& [loc, p] : n.assignment) {
    out += "    " + loc.name + ": " + to_string(p) + ";\n";
  }
  out += "  }\n";
  if (!n.topology.edges.empty()) {
    out += "  edges {";
    for (const auto& [a, b] : n.topology.edges) out += " " + a.name + " -- " + b.name + ";";
    out += " }\n";
  }
  if (!n.restricted.empty()) {
    out += "  restrict { ";
    for (std::size_t i = 0; i < n.restricted.size(); ++i) {
      if (i) out += ", ";
      out += n.restricted[i].name;
    }
    out += " }\n";
  }
  return out + "}\n";
}

std::string print(const SourceModel& m) {
  std::string out;
  if (!m.imports.empty()) {
    out += "import ";
    for (std::size_t i = 0; i < m.imports.size(); ++i) {
      if (i) out += ", ";
      out += m.imports[i];
    }
    out += ";\n";
  }
  if (m.universe) {
    out += "universe { ";
    print_values(out, *m.universe);
    out += " }\n";
  }
  if (!out.empty()) out += "\n";
  for (const auto& d : m.definitions) {
    out += d.name;
    if (!d.params.empty()) {
      out += "(";
      for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (i) out += ", ";
        out += d.params[i];
      }
      out += ")";
    }
    out += " := " + to_string(d.body) + ";\n";
  }
  for (const auto& n : m.networks) out += "\n" + print_network(n.name, n.network);
  return out;
}

bool same(const SourceModel& a, const SourceModel& b) {
  if (a.definitions.size() != b.definitions.size() || a.networks.size() != b.networks.size() ||
      a.imports != b.imports || a.universe.has_value() != b.universe.has_value()) {
    return false;
  }
  if (a.universe && *a.universe != *b.universe) return false;
  for (std::size_t i = 0; i < a.definitions.size(); ++i) {
    const auto& x = a.definitions[i];
    const auto& y = b.definitions[i];
    if (x.name != y.name || x.params != y.params || !same(x.body, y.body)) return false;
  }
  for (std::size_t i = 0; i < a.networks.size(); ++i) {
    if (a.networks[i].name != b.networks[i].name ||
        !same_network(a.networks[i].network, b.networks[i].network)) {
      return false;
    }
  }
  return true;
}

std::vector<Diagnostic> validate(const SourceModel& m) {
  Environment env = m.environment();
  std::vector<Diagnostic> out = validate_definitions(env);
  for (const auto& name : m.imports) {
    if (!env.primitives().find(name)) {
      out.push_back({DiagnosticKind::UnknownPrimitive, "import of unknown primitive " + name});
    }
  }
  std::set<std::string> seen;
  for (const auto& d : out) seen.insert(d.message);
  for (const auto& n : m.networks) {
    for (auto& d : validate(n.network, env)) {
      if (seen.count(d.message)) continue;
      d.message = n.name + ": " + d.message;
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace gcwn
