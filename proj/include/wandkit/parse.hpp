#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wandkit/ast.hpp"

namespace wandkit {

struct SourcePos {
    int line = 1;
    int column = 1;
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string& msg)
        : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg),
          pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

enum class TokKind { Ident, Int, Punct, String, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    SourcePos pos;
};

/// Tokenizer shared by every text format. `//` starts a line comment.
/// Newlines are reported as Punct "\n" tokens only when `keep_newlines` is set.
std::vector<Token> tokenize(std::string_view text, bool keep_newlines = false);

/// Recursive-descent reader over a token vector.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at_end() const { return peek().kind == TokKind::End; }
    bool is(std::string_view punct_or_keyword, std::size_t ahead = 0) const;
    bool accept(std::string_view punct_or_keyword);
    Token expect(std::string_view punct_or_keyword);
    std::string expect_ident();
    std::int64_t expect_int();
    [[noreturn]] void fail(const std::string& msg) const;
    void skip_newlines();

    std::size_t position() const { return pos_; }
    void rewind(std::size_t p) { pos_ = p; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

Expr parse_expr(TokenStream& ts);
Assertion parse_assertion(TokenStream& ts);
Perm parse_perm_amount(TokenStream& ts);

Expr parse_expr(std::string_view text);
Assertion parse_assertion(std::string_view text);

} // namespace wandkit
