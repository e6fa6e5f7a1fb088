#include "wandkit/parse.hpp"

#include <cctype>
#include <limits>

namespace wandkit {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

const char* const kMultiPuncts[] = {"--*c", "==>", "--*", "==", "!=", "<=", ">=", "&&", "||", ":=", "---"};

} // namespace

std::vector<Token> tokenize(std::string_view text, bool keep_newlines) {
    std::vector<Token> out;
    SourcePos pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            if (keep_newlines) out.push_back({TokKind::Punct, "\n", pos});
            advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        const SourcePos start = pos;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            out.push_back({TokKind::Ident, std::string(text.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({TokKind::Int, std::string(text.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= text.size() || text[j] != '"') throw ParseError(start, "unterminated string");
            out.push_back({TokKind::String, std::string(text.substr(i + 1, j - i - 1)), start});
            advance(j + 1 - i);
            continue;
        }
        bool matched = false;
        for (const char* p : kMultiPuncts) {
            const std::string_view pv(p);
            if (text.substr(i, pv.size()) == pv) {
                // "--*c" only when the c is not the start of an identifier
                if (pv == "--*c" && i + 4 < text.size() && ident_char(text[i + 4])) continue;
                out.push_back({TokKind::Punct, std::string(pv), start});
                advance(pv.size());
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("(){}[],.:;?!<>*/-+=@|&").find(c) != std::string_view::npos) {
            out.push_back({TokKind::Punct, std::string(1, c), start});
            advance(1);
            continue;
        }
        throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({TokKind::End, "", pos});
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    const std::size_t p = pos_ + ahead;
    return p < toks_.size() ? toks_[p] : toks_.back();
}

Token TokenStream::next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
}

bool TokenStream::is(std::string_view s, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return (t.kind == TokKind::Punct || t.kind == TokKind::Ident) && t.text == s;
}

bool TokenStream::accept(std::string_view s) {
    if (!is(s)) return false;
    next();
    return true;
}

Token TokenStream::expect(std::string_view s) {
    if (!is(s)) fail("expected '" + std::string(s) + "'");
    return next();
}

std::string TokenStream::expect_ident() {
    if (peek().kind != TokKind::Ident) fail("expected identifier");
    return next().text;
}

std::int64_t TokenStream::expect_int() {
    if (peek().kind != TokKind::Int) fail("expected integer");
    const Token t = next();
    try {
        return std::stoll(t.text);
    } catch (const std::exception&) {
        throw ParseError(t.pos, "integer out of range");
    }
}

void TokenStream::fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == TokKind::End ? "end of input" : (t.text == "\n" ? "newline" : "'" + t.text + "'");
    throw ParseError(t.pos, msg + ", found " + found);
}

void TokenStream::skip_newlines() {
    while (is("\n")) next();
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

namespace {

bool is_keyword(const std::string& s) {
    return s == "true" || s == "false" || s == "null" || s == "write" || s == "none" || s == "perm" ||
           s == "acc";
}

Expr parse_ternary(TokenStream& ts);
Expr parse_unary(TokenStream& ts);

Expr parse_primary(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.kind == TokKind::Int) {
        const std::int64_t n = ts.expect_int();
        if (ts.accept("/")) {
            const std::int64_t d = ts.expect_int();
            if (d == 0) ts.fail("zero denominator");
            return Expr::perm_lit(Perm(n, d));
        }
        return Expr::int_lit(n);
    }
    if (t.kind == TokKind::Ident) {
        if (ts.accept("true")) return Expr::bool_lit(true);
        if (ts.accept("false")) return Expr::bool_lit(false);
        if (ts.accept("null")) return Expr::var("null");
        if (ts.accept("write")) return Expr::perm_lit(kFullPerm);
        if (ts.accept("none")) return Expr::perm_lit(kNoPerm);
        if (ts.accept("perm")) {
            ts.expect("(");
            Expr loc = parse_unary(ts);
            ts.expect(")");
            if (loc->kind != ExprKind::Field) ts.fail("perm() expects a field access");
            return Expr::perm_of(loc->kids[0], loc->name);
        }
        if (t.text == "acc") ts.fail("accessibility predicate in expression position");
        return Expr::var(ts.expect_ident());
    }
    if (ts.accept("(")) {
        Expr e = parse_ternary(ts);
        ts.expect(")");
        return e;
    }
    ts.fail("expected expression");
}

Expr parse_postfix(TokenStream& ts) {
    Expr e = parse_primary(ts);
    while (ts.is(".") && ts.peek(1).kind == TokKind::Ident) {
        ts.next();
        e = Expr::field(e, ts.expect_ident());
    }
    return e;
}

Expr parse_unary(TokenStream& ts) {
    if (ts.accept("!")) return Expr::negate(parse_unary(ts));
    if (ts.is("-") && ts.peek(1).kind == TokKind::Int) {
        ts.next();
        return Expr::int_lit(-ts.expect_int());
    }
    return parse_postfix(ts);
}

std::optional<BinOp> cmp_op(const TokenStream& ts) {
    if (ts.is("==")) return BinOp::Eq;
    if (ts.is("!=")) return BinOp::Ne;
    if (ts.is("<=")) return BinOp::Le;
    if (ts.is(">=")) return BinOp::Ge;
    if (ts.is("<")) return BinOp::Lt;
    if (ts.is(">")) return BinOp::Gt;
    return std::nullopt;
}

Expr parse_cmp(TokenStream& ts) {
    Expr l = parse_unary(ts);
    if (auto op = cmp_op(ts)) {
        ts.next();
        Expr r = parse_unary(ts);
        return Expr::binary(*op, l, r);
    }
    return l;
}

Expr parse_and(TokenStream& ts) {
    Expr l = parse_cmp(ts);
    while (ts.accept("&&")) l = Expr::binary(BinOp::And, l, parse_cmp(ts));
    return l;
}

Expr parse_or(TokenStream& ts) {
    Expr l = parse_and(ts);
    while (ts.accept("||")) l = Expr::binary(BinOp::Or, l, parse_and(ts));
    return l;
}

Expr parse_implies(TokenStream& ts) {
    Expr l = parse_or(ts);
    if (ts.accept("==>")) return Expr::binary(BinOp::Implies, l, parse_implies(ts));
    return l;
}

Expr parse_ternary(TokenStream& ts) {
    Expr c = parse_implies(ts);
    if (ts.accept("?")) {
        Expr t = parse_ternary(ts);
        ts.expect(":");
        Expr e = parse_ternary(ts);
        return Expr::ternary(c, t, e);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Assertions
// ---------------------------------------------------------------------------

Assertion parse_wand(TokenStream& ts);
Assertion parse_aor(TokenStream& ts);

Assertion make_star(Assertion l, Assertion r) {
    if (is_pure(l) && is_pure(r)) return Assertion::pure(Expr::binary(BinOp::And, to_expr(l), to_expr(r)));
    return Assertion::star(l, r);
}

Assertion make_or(Assertion l, Assertion r) {
    if (is_pure(l) && is_pure(r)) return Assertion::pure(Expr::binary(BinOp::Or, to_expr(l), to_expr(r)));
    return Assertion::disj(l, r);
}

Assertion make_imp(Expr guard, Assertion body) {
    if (is_pure(body)) return Assertion::pure(Expr::binary(BinOp::Implies, guard, to_expr(body)));
    return Assertion::imp(guard, body);
}

std::vector<Expr> parse_args(TokenStream& ts) {
    std::vector<Expr> args;
    ts.expect("(");
    if (!ts.is(")")) {
        do {
            args.push_back(parse_ternary(ts));
        } while (ts.accept(","));
    }
    ts.expect(")");
    return args;
}

Assertion parse_aunary(TokenStream& ts) {
    if (ts.accept("acc")) {
        ts.expect("(");
        Assertion result;
        if (ts.peek().kind == TokKind::Ident && !is_keyword(ts.peek().text) && ts.is("(", 1)) {
            std::string name = ts.expect_ident();
            std::vector<Expr> args = parse_args(ts);
            Perm amount = kFullPerm;
            if (ts.accept(",")) amount = parse_perm_amount(ts);
            result = Assertion::pred(std::move(name), std::move(args), amount);
        } else {
            Expr loc = parse_postfix(ts);
            if (loc->kind != ExprKind::Field) ts.fail("acc() expects a field access");
            Perm amount = kFullPerm;
            if (ts.accept(",")) amount = parse_perm_amount(ts);
            result = Assertion::acc(loc->kids[0], loc->name, amount);
        }
        ts.expect(")");
        return result;
    }
    if (ts.peek().kind == TokKind::Ident && !is_keyword(ts.peek().text) && ts.is("(", 1)) {
        std::string name = ts.expect_ident();
        return Assertion::pred(std::move(name), parse_args(ts));
    }
    if (ts.is("(")) {
        // A parenthesised assertion, unless it is the start of a longer pure expression.
        const std::size_t save = ts.position();
        ts.next();
        Assertion inner = parse_wand(ts);
        ts.expect(")");
        if (!is_pure(inner) || !(cmp_op(ts) || ts.is(".") || ts.is("?"))) return inner;
        ts.rewind(save);
    }
    Expr c = parse_cmp(ts);
    if (ts.accept("?")) {
        Assertion t = parse_aor(ts);
        ts.expect(":");
        Assertion e = parse_aor(ts);
        if (is_pure(t) && is_pure(e)) return Assertion::pure(Expr::ternary(c, to_expr(t), to_expr(e)));
        return make_star(make_imp(c, t), make_imp(Expr::negate(c), e));
    }
    return Assertion::pure(c);
}

Assertion parse_astar(TokenStream& ts) {
    Assertion l = parse_aunary(ts);
    while (ts.is("*") || ts.is("&&")) {
        ts.next();
        l = make_star(l, parse_aunary(ts));
    }
    return l;
}

Assertion parse_aor(TokenStream& ts) {
    Assertion l = parse_astar(ts);
    while (ts.accept("||")) l = make_or(l, parse_astar(ts));
    return l;
}

Assertion parse_aimp(TokenStream& ts) {
    const Token start = ts.peek();
    Assertion l = parse_aor(ts);
    if (ts.accept("==>")) {
        if (!is_pure(l)) throw ParseError(start.pos, "implication guard must be pure");
        return make_imp(to_expr(l), parse_aimp(ts));
    }
    return l;
}

Assertion parse_wand(TokenStream& ts) {
    Assertion l = parse_aimp(ts);
    if (ts.is("--*") || ts.is("--*c")) {
        const WandKind kind = ts.next().text == "--*c" ? WandKind::Combinable : WandKind::Standard;
        return Assertion::wand(l, parse_wand(ts), kind);
    }
    return l;
}

} // namespace

Perm parse_perm_amount(TokenStream& ts) {
    if (ts.accept("write")) return kFullPerm;
    if (ts.accept("none")) return kNoPerm;
    const std::int64_t n = ts.expect_int();
    if (ts.accept("/")) {
        const std::int64_t d = ts.expect_int();
        if (d == 0) ts.fail("zero denominator");
        return Perm(n, d);
    }
    return Perm(n);
}

Expr parse_expr(TokenStream& ts) { return parse_ternary(ts); }
Assertion parse_assertion(TokenStream& ts) { return parse_wand(ts); }

Expr parse_expr(std::string_view text) {
    TokenStream ts(tokenize(text));
    Expr e = parse_ternary(ts);
    if (!ts.at_end()) ts.fail("trailing input");
    return e;
}

Assertion parse_assertion(std::string_view text) {
    TokenStream ts(tokenize(text));
    Assertion a = parse_wand(ts);
    if (!ts.at_end()) ts.fail("trailing input");
    return a;
}

} // namespace wandkit
