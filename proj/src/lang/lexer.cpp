#include "gasrepair/lang/lexer.hpp"

#include <cctype>
#include <map>

namespace gasrepair {

static const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> kw = {
        {"contract", Tok::KwContract}, {"function", Tok::KwFunction},
        {"payable", Tok::KwPayable},   {"returns", Tok::KwReturns},
        {"uint", Tok::KwUint},         {"bool", Tok::KwBool},
        {"address", Tok::KwAddress},   {"mapping", Tok::KwMapping},
        {"if", Tok::KwIf},             {"else", Tok::KwElse},
        {"while", Tok::KwWhile},       {"require", Tok::KwRequire},
        {"return", Tok::KwReturn},     {"true", Tok::KwTrue},
        {"false", Tok::KwFalse},       {"msg", Tok::KwMsg},
        {"send", Tok::KwSend},         {"balance", Tok::KwBalance},
    };
    return kw;
}

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string text, int l, int c) {
        Token t;
        t.kind = k;
        t.text = std::move(text);
        t.line = l;
        t.col = c;
        out.push_back(std::move(t));
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            std::string word = src.substr(i, j - i);
            auto it = keywords().find(word);
            push(it != keywords().end() ? it->second : Tok::Ident, word, tl, tc);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            bool hex = false;
            if (c == '0' && j + 1 < src.size() && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
                hex = true;
                j += 2;
                size_t digits = j;
                while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
                if (j == digits) throw ParseError(tl, tc, "malformed hex literal");
            } else {
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            std::string word = src.substr(i, j - i);
            Token t;
            t.kind = Tok::Int;
            t.text = word;
            t.line = tl;
            t.col = tc;
            bool tooBig = false;
            if (hex) {
                tooBig = word.size() - 2 > 64;
            } else {
                static const std::string maxDec = "1157920892373161954235709850086879078532"
                                                  "69984665640564039457584007913129639935";
                std::string digits = word.substr(word.find_first_not_of('0') == std::string::npos
                                                     ? word.size() - 1
                                                     : word.find_first_not_of('0'));
                tooBig = digits.size() > maxDec.size() ||
                         (digits.size() == maxDec.size() && digits > maxDec);
            }
            if (tooBig) throw ParseError(tl, tc, "integer literal out of range: " + word);
            try {
                t.intValue = U256(word);
            } catch (const std::exception&) {
                throw ParseError(tl, tc, "integer literal out of range: " + word);
            }
            out.push_back(std::move(t));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two('=', '>')) { push(Tok::Arrow, "=>", tl, tc); i += 2; col += 2; continue; }
        if (two('=', '=')) { push(Tok::EqEq, "==", tl, tc); i += 2; col += 2; continue; }
        if (two('!', '=')) { push(Tok::NotEq, "!=", tl, tc); i += 2; col += 2; continue; }
        if (two('<', '=')) { push(Tok::Le, "<=", tl, tc); i += 2; col += 2; continue; }
        if (two('>', '=')) { push(Tok::Ge, ">=", tl, tc); i += 2; col += 2; continue; }
        if (two('&', '&')) { push(Tok::AndAnd, "&&", tl, tc); i += 2; col += 2; continue; }
        if (two('|', '|')) { push(Tok::OrOr, "||", tl, tc); i += 2; col += 2; continue; }
        Tok k;
        switch (c) {
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '[': k = Tok::LBracket; break;
            case ']': k = Tok::RBracket; break;
            case ';': k = Tok::Semi; break;
            case ',': k = Tok::Comma; break;
            case '.': k = Tok::Dot; break;
            case '=': k = Tok::Assign; break;
            case '<': k = Tok::Lt; break;
            case '>': k = Tok::Gt; break;
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '!': k = Tok::Bang; break;
            default:
                throw ParseError(tl, tc, std::string("unexpected character '") + c + "'");
        }
        push(k, std::string(1, c), tl, tc);
        ++i;
        ++col;
    }
    push(Tok::End, "", line, col);
    return out;
}

} // namespace gasrepair
