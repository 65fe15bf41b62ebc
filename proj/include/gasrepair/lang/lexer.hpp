#pragma once

#include "gasrepair/lang/ast.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace gasrepair {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + msg),
          line(line_),
          col(col_) {}
};

enum class Tok : uint8_t {
    Ident,
    Int,
    KwContract,
    KwFunction,
    KwPayable,
    KwReturns,
    KwUint,
    KwBool,
    KwAddress,
    KwMapping,
    KwIf,
    KwElse,
    KwWhile,
    KwRequire,
    KwReturn,
    KwTrue,
    KwFalse,
    KwMsg,
    KwSend,
    KwBalance,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Assign,
    Arrow, // =>
    EqEq,
    NotEq,
    Le,
    Ge,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    AndAnd,
    OrOr,
    Bang,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    U256 intValue = 0;
    int line = 1;
    int col = 1;
};

// Throws ParseError on unknown characters or malformed literals.
std::vector<Token> lex(const std::string& src);

} // namespace gasrepair
