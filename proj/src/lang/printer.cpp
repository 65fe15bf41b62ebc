#include "gasrepair/lang/printer.hpp"

#include "gasrepair/util/hash.hpp"

#include <sstream>

namespace gasrepair {

namespace {

int precedence(const Expr& e) {
    if (e.kind != ExprKind::Binary) return 100;
    switch (e.op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq:
        case BinOp::Ne: return 3;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 4;
        case BinOp::Add:
        case BinOp::Sub: return 5;
        case BinOp::Mul:
        case BinOp::Div: return 6;
    }
    return 100;
}

void printExprTo(std::ostringstream& os, const Expr& e) {
    auto child = [&os](const Expr& parent, const Expr& kid, bool rightSide) {
        int pp = precedence(parent), pk = precedence(kid);
        bool parens = pk < pp || (pk == pp && rightSide);
        if (parens) os << "(";
        printExprTo(os, kid);
        if (parens) os << ")";
    };
    switch (e.kind) {
        case ExprKind::IntLit: os << e.value; break;
        case ExprKind::BoolLit: os << (e.value != 0 ? "true" : "false"); break;
        case ExprKind::AddressLit: os << "address(" << e.value << ")"; break;
        case ExprKind::Var: os << e.name; break;
        case ExprKind::MappingIndex:
            os << e.name << "[";
            printExprTo(os, e.kids[0]);
            os << "]";
            break;
        case ExprKind::Binary:
            child(e, e.kids[0], false);
            os << " " << binOpName(e.op) << " ";
            child(e, e.kids[1], true);
            break;
        case ExprKind::Not:
            os << "!";
            if (precedence(e.kids[0]) < 100) {
                os << "(";
                printExprTo(os, e.kids[0]);
                os << ")";
            } else {
                printExprTo(os, e.kids[0]);
            }
            break;
        case ExprKind::MsgSender: os << "msg.sender"; break;
        case ExprKind::MsgValue: os << "msg.value"; break;
        case ExprKind::BalanceOf:
            os << "balance(";
            printExprTo(os, e.kids[0]);
            os << ")";
            break;
        case ExprKind::Send:
            if (precedence(e.kids[0]) < 100) {
                os << "(";
                printExprTo(os, e.kids[0]);
                os << ")";
            } else {
                printExprTo(os, e.kids[0]);
            }
            os << ".send(";
            printExprTo(os, e.kids[1]);
            os << ")";
            break;
    }
}

void indentTo(std::ostringstream& os, int n) {
    for (int i = 0; i < n; ++i) os << "    ";
}

void printBlockTo(std::ostringstream& os, const Block& b, int indent);

void printStmtTo(std::ostringstream& os, const Stmt& s, int indent) {
    indentTo(os, indent);
    switch (s.kind) {
        case StmtKind::VarDecl:
            os << typeName(s.declType) << " " << s.name << " = ";
            printExprTo(os, s.exprs[0]);
            os << ";\n";
            break;
        case StmtKind::Assign:
            printExprTo(os, s.exprs[0]);
            os << " = ";
            printExprTo(os, s.exprs[1]);
            os << ";\n";
            break;
        case StmtKind::If:
            os << "if (";
            printExprTo(os, s.exprs[0]);
            os << ") ";
            printBlockTo(os, s.blocks[0], indent);
            if (s.blocks.size() > 1) {
                os << " else ";
                printBlockTo(os, s.blocks[1], indent);
            }
            os << "\n";
            break;
        case StmtKind::While:
            os << "while (";
            printExprTo(os, s.exprs[0]);
            os << ") ";
            printBlockTo(os, s.blocks[0], indent);
            os << "\n";
            break;
        case StmtKind::Require:
            os << "require(";
            printExprTo(os, s.exprs[0]);
            os << ");\n";
            break;
        case StmtKind::Return:
            os << "return";
            if (!s.exprs.empty()) {
                os << " ";
                printExprTo(os, s.exprs[0]);
            }
            os << ";\n";
            break;
        case StmtKind::ExprStmt:
            printExprTo(os, s.exprs[0]);
            os << ";\n";
            break;
    }
}

void printBlockTo(std::ostringstream& os, const Block& b, int indent) {
    if (b.stmts.empty()) {
        os << "{ }";
        return;
    }
    os << "{\n";
    for (const Stmt& s : b.stmts) printStmtTo(os, s, indent + 1);
    indentTo(os, indent);
    os << "}";
}

} // namespace

std::string printExpr(const Expr& e) {
    std::ostringstream os;
    printExprTo(os, e);
    return os.str();
}

std::string printStmt(const Stmt& s, int indent) {
    std::ostringstream os;
    printStmtTo(os, s, indent);
    return os.str();
}

std::string prettyPrint(const Contract& c) {
    std::ostringstream os;
    os << "contract " << c.name << " {\n";
    for (const StateVar& v : c.stateVars) {
        indentTo(os, 1);
        os << typeName(v.type) << " " << v.name;
        if (v.init) {
            os << " = ";
            printExprTo(os, *v.init);
        }
        os << ";\n";
    }
    for (const Function& f : c.functions) {
        os << "\n";
        indentTo(os, 1);
        os << "function " << f.name << "(";
        for (size_t i = 0; i < f.params.size(); ++i) {
            if (i) os << ", ";
            os << typeName(f.params[i].type) << " " << f.params[i].name;
        }
        os << ")";
        if (f.payable) os << " payable";
        if (f.returnType) os << " returns (" << typeName(*f.returnType) << ")";
        os << " ";
        printBlockTo(os, f.body, 1);
        os << "\n";
    }
    os << "}\n";
    return os.str();
}

uint64_t contentHash(const Contract& c) { return fnv1a64(prettyPrint(c)); }

} // namespace gasrepair
