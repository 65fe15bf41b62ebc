#include "gasrepair/lang/parser.hpp"

namespace gasrepair {

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Contract parseContract() {
        expect(Tok::KwContract, "expected 'contract'");
        Contract c;
        c.name = expect(Tok::Ident, "expected contract name").text;
        expect(Tok::LBrace, "expected '{'");
        while (isTypeStart(peek().kind) && !startsFunction()) c.stateVars.push_back(stateVar());
        while (at(Tok::KwFunction)) c.functions.push_back(function());
        expect(Tok::RBrace, "expected '}'");
        expect(Tok::End, "trailing input after contract");
        return c;
    }

    Expr parseLoneExpression() {
        Expr e = expression();
        expect(Tok::End, "trailing input after expression");
        return e;
    }

    Stmt parseLoneStatement() {
        Stmt s = statement();
        expect(Tok::End, "trailing input after statement");
        return s;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Tok k) const { return peek().kind == k; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        advance();
        return true;
    }
    const Token& expect(Tok k, const std::string& msg) {
        if (!at(k)) throw ParseError(peek().line, peek().col, msg + ", got '" + peek().text + "'");
        return advance();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(peek().line, peek().col, msg + ", got '" + peek().text + "'");
    }

    static bool isTypeStart(Tok k) {
        return k == Tok::KwUint || k == Tok::KwBool || k == Tok::KwAddress || k == Tok::KwMapping;
    }
    bool startsFunction() const { return at(Tok::KwFunction); }

    Type scalarType() {
        if (accept(Tok::KwUint)) return Type::UInt;
        if (accept(Tok::KwBool)) return Type::Bool;
        if (accept(Tok::KwAddress)) return Type::Address;
        fail("expected 'uint', 'bool' or 'address'");
    }

    Type anyType() {
        if (at(Tok::KwMapping)) {
            advance();
            expect(Tok::LParen, "expected '(' after 'mapping'");
            expect(Tok::KwAddress, "mapping keys must be 'address'");
            expect(Tok::Arrow, "expected '=>'");
            expect(Tok::KwUint, "mapping values must be 'uint'");
            expect(Tok::RParen, "expected ')'");
            return Type::Mapping;
        }
        return scalarType();
    }

    StateVar stateVar() {
        StateVar v;
        v.type = anyType();
        v.name = expect(Tok::Ident, "expected state variable name").text;
        if (accept(Tok::Assign)) v.init = expression();
        expect(Tok::Semi, "expected ';'");
        return v;
    }

    Function function() {
        expect(Tok::KwFunction, "expected 'function'");
        Function f;
        f.name = expect(Tok::Ident, "expected function name").text;
        expect(Tok::LParen, "expected '('");
        if (!at(Tok::RParen)) {
            do {
                Param p;
                p.type = scalarType();
                p.name = expect(Tok::Ident, "expected parameter name").text;
                f.params.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "expected ')'");
        if (accept(Tok::KwPayable)) f.payable = true;
        if (accept(Tok::KwReturns)) {
            expect(Tok::LParen, "expected '(' after 'returns'");
            f.returnType = scalarType();
            expect(Tok::RParen, "expected ')'");
        }
        f.body = block();
        return f;
    }

    Block block() {
        Block b;
        expect(Tok::LBrace, "expected '{'");
        while (!at(Tok::RBrace) && !at(Tok::End)) b.stmts.push_back(statement());
        expect(Tok::RBrace, "expected '}'");
        return b;
    }

    Stmt statement() {
        int startLine = peek().line;
        Stmt s = statementBody();
        s.line = startLine;
        return s;
    }

    Stmt statementBody() {
        // 'address(' opens an address literal expression, not a declaration.
        bool addrLit = at(Tok::KwAddress) && peek(1).kind == Tok::LParen;
        if (isTypeStart(peek().kind) && !addrLit) {
            if (at(Tok::KwMapping)) fail("mappings are state variables only");
            Stmt s;
            s.kind = StmtKind::VarDecl;
            s.declType = scalarType();
            s.name = expect(Tok::Ident, "expected variable name").text;
            expect(Tok::Assign, "local declarations need an initializer");
            s.exprs.push_back(expression());
            expect(Tok::Semi, "expected ';'");
            return s;
        }
        if (at(Tok::KwIf)) {
            advance();
            Stmt s;
            s.kind = StmtKind::If;
            expect(Tok::LParen, "expected '('");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "expected ')'");
            s.blocks.push_back(block());
            if (accept(Tok::KwElse)) s.blocks.push_back(block());
            return s;
        }
        if (at(Tok::KwWhile)) {
            advance();
            Stmt s;
            s.kind = StmtKind::While;
            expect(Tok::LParen, "expected '('");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "expected ')'");
            s.blocks.push_back(block());
            return s;
        }
        if (at(Tok::KwRequire)) {
            advance();
            Stmt s;
            s.kind = StmtKind::Require;
            expect(Tok::LParen, "expected '('");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "expected ')'");
            expect(Tok::Semi, "expected ';'");
            return s;
        }
        if (at(Tok::KwReturn)) {
            advance();
            Stmt s;
            s.kind = StmtKind::Return;
            if (!at(Tok::Semi)) s.exprs.push_back(expression());
            expect(Tok::Semi, "expected ';'");
            return s;
        }
        // Assignment or bare expression; '=' is not an expression operator,
        // so parse an expression first and look at what follows.
        const Token& start = peek();
        Expr e = expression();
        if (accept(Tok::Assign)) {
            if (e.kind != ExprKind::Var && e.kind != ExprKind::MappingIndex)
                throw ParseError(start.line, start.col,
                                 "assignment target must be a variable or mapping element");
            Stmt s = mkAssign(std::move(e), expression());
            expect(Tok::Semi, "expected ';'");
            return s;
        }
        expect(Tok::Semi, "expected ';'");
        return mkExprStmt(std::move(e));
    }

    // Precedence: || < && < (== !=) < (< <= > >=) < (+ -) < (* /) < unary ! < postfix .send
    Expr expression() { return orExpr(); }

    Expr orExpr() {
        Expr e = andExpr();
        while (at(Tok::OrOr)) {
            advance();
            e = mkBin(BinOp::Or, std::move(e), andExpr());
        }
        return e;
    }

    Expr andExpr() {
        Expr e = eqExpr();
        while (at(Tok::AndAnd)) {
            advance();
            e = mkBin(BinOp::And, std::move(e), eqExpr());
        }
        return e;
    }

    Expr eqExpr() {
        Expr e = relExpr();
        while (at(Tok::EqEq) || at(Tok::NotEq)) {
            BinOp op = at(Tok::EqEq) ? BinOp::Eq : BinOp::Ne;
            advance();
            e = mkBin(op, std::move(e), relExpr());
        }
        return e;
    }

    Expr relExpr() {
        Expr e = addExpr();
        while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
            BinOp op = at(Tok::Lt)   ? BinOp::Lt
                       : at(Tok::Le) ? BinOp::Le
                       : at(Tok::Gt) ? BinOp::Gt
                                     : BinOp::Ge;
            advance();
            e = mkBin(op, std::move(e), addExpr());
        }
        return e;
    }

    Expr addExpr() {
        Expr e = mulExpr();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            advance();
            e = mkBin(op, std::move(e), mulExpr());
        }
        return e;
    }

    Expr mulExpr() {
        Expr e = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            BinOp op = at(Tok::Star) ? BinOp::Mul : BinOp::Div;
            advance();
            e = mkBin(op, std::move(e), unary());
        }
        return e;
    }

    Expr unary() {
        if (accept(Tok::Bang)) return mkNot(unary());
        return postfix();
    }

    Expr postfix() {
        Expr e = primary();
        while (at(Tok::Dot) && peek(1).kind == Tok::KwSend) {
            advance();
            advance();
            expect(Tok::LParen, "expected '(' after 'send'");
            Expr amount = expression();
            expect(Tok::RParen, "expected ')'");
            e = mkSend(std::move(e), std::move(amount));
        }
        return e;
    }

    Expr primary() {
        if (at(Tok::Int)) return mkInt(advance().intValue);
        if (accept(Tok::KwTrue)) return mkBool(true);
        if (accept(Tok::KwFalse)) return mkBool(false);
        if (at(Tok::KwMsg)) {
            advance();
            expect(Tok::Dot, "expected '.' after 'msg'");
            const Token& field = expect(Tok::Ident, "expected 'sender' or 'value'");
            if (field.text == "sender") return mkMsgSender();
            if (field.text == "value") return mkMsgValue();
            throw ParseError(field.line, field.col, "unknown msg field '" + field.text + "'");
        }
        if (at(Tok::KwBalance)) {
            advance();
            expect(Tok::LParen, "expected '(' after 'balance'");
            Expr e = expression();
            expect(Tok::RParen, "expected ')'");
            return mkBalanceOf(std::move(e));
        }
        if (at(Tok::KwAddress)) {
            advance();
            expect(Tok::LParen, "expected '(' after 'address'");
            const Token& lit = expect(Tok::Int, "address literal takes an integer");
            if (lit.intValue >> 160 != 0)
                throw ParseError(lit.line, lit.col, "address literal wider than 160 bits");
            expect(Tok::RParen, "expected ')'");
            return mkAddress(lit.intValue);
        }
        if (at(Tok::Ident)) {
            std::string name = advance().text;
            if (accept(Tok::LBracket)) {
                Expr key = expression();
                expect(Tok::RBracket, "expected ']'");
                return mkIndex(name, std::move(key));
            }
            return mkVar(name);
        }
        if (accept(Tok::LParen)) {
            Expr e = expression();
            expect(Tok::RParen, "expected ')'");
            return e;
        }
        fail("expected expression");
    }
};

} // namespace

Contract parse(const std::string& source) { return Parser(lex(source)).parseContract(); }

Expr parseExpression(const std::string& source) {
    return Parser(lex(source)).parseLoneExpression();
}

Stmt parseStatement(const std::string& source) {
    return Parser(lex(source)).parseLoneStatement();
}

} // namespace gasrepair
