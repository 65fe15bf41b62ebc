#include "gasrepair/lang/ast.hpp"

#include <sstream>

namespace gasrepair {

std::string pathToString(const NodePath& p) {
    std::string out;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(p[i]);
    }
    return out;
}

std::optional<NodePath> pathFromString(const std::string& s) {
    NodePath p;
    if (s.empty()) return p;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t dot = s.find('.', pos);
        std::string part = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (part.empty()) return std::nullopt;
        for (char c : part)
            if (c < '0' || c > '9') return std::nullopt;
        p.push_back(static_cast<uint32_t>(std::stoul(part)));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return p;
}

bool isPrefix(const NodePath& pre, const NodePath& full) {
    if (pre.size() > full.size()) return false;
    for (size_t i = 0; i < pre.size(); ++i)
        if (pre[i] != full[i]) return false;
    return true;
}

size_t childCount(NodeRef n) {
    return std::visit(
        [](auto* node) -> size_t {
            using T = std::decay_t<decltype(*node)>;
            if constexpr (std::is_same_v<T, Contract>) {
                return node->stateVars.size() + node->functions.size();
            } else if constexpr (std::is_same_v<T, StateVar>) {
                return node->init ? 1u : 0u;
            } else if constexpr (std::is_same_v<T, Function>) {
                return 1;
            } else if constexpr (std::is_same_v<T, Block>) {
                return node->stmts.size();
            } else if constexpr (std::is_same_v<T, Stmt>) {
                return node->exprs.size() + node->blocks.size();
            } else {
                return node->kids.size();
            }
        },
        n);
}

NodeRef childAt(NodeRef n, uint32_t i) {
    return std::visit(
        [i](auto* node) -> NodeRef {
            using T = std::decay_t<decltype(*node)>;
            if constexpr (std::is_same_v<T, Contract>) {
                if (i < node->stateVars.size()) return &node->stateVars[i];
                return &node->functions[i - node->stateVars.size()];
            } else if constexpr (std::is_same_v<T, StateVar>) {
                return &*node->init;
            } else if constexpr (std::is_same_v<T, Function>) {
                return &node->body;
            } else if constexpr (std::is_same_v<T, Block>) {
                return &node->stmts[i];
            } else if constexpr (std::is_same_v<T, Stmt>) {
                if (i < node->exprs.size()) return &node->exprs[i];
                return &node->blocks[i - node->exprs.size()];
            } else {
                return &node->kids[i];
            }
        },
        n);
}

std::optional<NodeRef> resolve(Contract& c, const NodePath& path) {
    NodeRef cur = &c;
    for (uint32_t idx : path) {
        if (idx >= childCount(cur)) return std::nullopt;
        cur = childAt(cur, idx);
    }
    return cur;
}

static void walkInner(NodeRef n, NodePath& path,
                      const std::function<void(NodeRef, const NodePath&)>& fn) {
    fn(n, path);
    size_t count = childCount(n);
    for (uint32_t i = 0; i < count; ++i) {
        path.push_back(i);
        walkInner(childAt(n, i), path, fn);
        path.pop_back();
    }
}

void walk(Contract& c, const std::function<void(NodeRef, const NodePath&)>& fn) {
    NodePath path;
    walkInner(&c, path, fn);
}

std::string nodeLabel(NodeRef n) {
    std::ostringstream os;
    std::visit(
        [&os](auto* node) {
            using T = std::decay_t<decltype(*node)>;
            if constexpr (std::is_same_v<T, Contract>) {
                os << "contract:" << node->name << ":" << node->stateVars.size();
            } else if constexpr (std::is_same_v<T, StateVar>) {
                os << "state:" << node->name << ":" << typeName(node->type);
            } else if constexpr (std::is_same_v<T, Function>) {
                os << "fn:" << node->name << ":" << (node->payable ? "p" : "-") << ":";
                for (const auto& p : node->params) os << p.name << "/" << typeName(p.type) << ",";
                os << ":" << (node->returnType ? typeName(*node->returnType) : "void");
            } else if constexpr (std::is_same_v<T, Block>) {
                os << "block";
            } else if constexpr (std::is_same_v<T, Stmt>) {
                os << "stmt:" << static_cast<int>(node->kind);
                if (node->kind == StmtKind::VarDecl)
                    os << ":" << node->name << ":" << typeName(node->declType);
                os << ":" << node->exprs.size() << ":" << node->blocks.size();
            } else {
                os << "expr:" << static_cast<int>(node->kind);
                switch (node->kind) {
                    case ExprKind::IntLit:
                    case ExprKind::AddressLit:
                    case ExprKind::BoolLit: os << ":" << node->value; break;
                    case ExprKind::Var:
                    case ExprKind::MappingIndex: os << ":" << node->name; break;
                    case ExprKind::Binary: os << ":" << binOpName(node->op); break;
                    default: break;
                }
            }
        },
        n);
    return os.str();
}

size_t countNodes(const Contract& c) {
    size_t n = 0;
    walk(const_cast<Contract&>(c), [&n](NodeRef, const NodePath&) { ++n; });
    return n;
}

static bool eqRef(NodeRef a, NodeRef b) {
    if (a.index() != b.index()) return false;
    if (nodeLabel(a) != nodeLabel(b)) return false;
    size_t n = childCount(a);
    if (n != childCount(b)) return false;
    for (uint32_t i = 0; i < n; ++i)
        if (!eqRef(childAt(a, i), childAt(b, i))) return false;
    return true;
}

bool structEq(const Expr& a, const Expr& b) {
    return eqRef(const_cast<Expr*>(&a), const_cast<Expr*>(&b));
}
bool structEq(const Stmt& a, const Stmt& b) {
    return eqRef(const_cast<Stmt*>(&a), const_cast<Stmt*>(&b));
}
bool structEq(const Block& a, const Block& b) {
    return eqRef(const_cast<Block*>(&a), const_cast<Block*>(&b));
}
bool structEq(const Contract& a, const Contract& b) {
    return eqRef(const_cast<Contract*>(&a), const_cast<Contract*>(&b));
}

Expr mkInt(const U256& v) {
    Expr e;
    e.kind = ExprKind::IntLit;
    e.value = v;
    return e;
}

Expr mkBool(bool b) {
    Expr e;
    e.kind = ExprKind::BoolLit;
    e.value = b ? 1 : 0;
    return e;
}

Expr mkAddress(const U256& v) {
    Expr e;
    e.kind = ExprKind::AddressLit;
    e.value = v;
    return e;
}

Expr mkVar(const std::string& name) {
    Expr e;
    e.kind = ExprKind::Var;
    e.name = name;
    return e;
}

Expr mkIndex(const std::string& name, Expr key) {
    Expr e;
    e.kind = ExprKind::MappingIndex;
    e.name = name;
    e.kids.push_back(std::move(key));
    return e;
}

Expr mkBin(BinOp op, Expr l, Expr r) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.op = op;
    e.kids.push_back(std::move(l));
    e.kids.push_back(std::move(r));
    return e;
}

Expr mkNot(Expr inner) {
    Expr e;
    e.kind = ExprKind::Not;
    e.kids.push_back(std::move(inner));
    return e;
}

Expr mkMsgSender() {
    Expr e;
    e.kind = ExprKind::MsgSender;
    return e;
}

Expr mkMsgValue() {
    Expr e;
    e.kind = ExprKind::MsgValue;
    return e;
}

Expr mkBalanceOf(Expr addr) {
    Expr e;
    e.kind = ExprKind::BalanceOf;
    e.kids.push_back(std::move(addr));
    return e;
}

Expr mkSend(Expr target, Expr amount) {
    Expr e;
    e.kind = ExprKind::Send;
    e.kids.push_back(std::move(target));
    e.kids.push_back(std::move(amount));
    return e;
}

Stmt mkAssign(Expr lvalue, Expr rhs) {
    Stmt s;
    s.kind = StmtKind::Assign;
    s.exprs.push_back(std::move(lvalue));
    s.exprs.push_back(std::move(rhs));
    return s;
}

Stmt mkRequire(Expr cond) {
    Stmt s;
    s.kind = StmtKind::Require;
    s.exprs.push_back(std::move(cond));
    return s;
}

Stmt mkExprStmt(Expr e) {
    Stmt s;
    s.kind = StmtKind::ExprStmt;
    s.exprs.push_back(std::move(e));
    return s;
}

Stmt mkVarDecl(const std::string& name, Type t, Expr init) {
    Stmt s;
    s.kind = StmtKind::VarDecl;
    s.name = name;
    s.declType = t;
    s.exprs.push_back(std::move(init));
    return s;
}

const char* typeName(Type t) {
    switch (t) {
        case Type::UInt: return "uint";
        case Type::Bool: return "bool";
        case Type::Address: return "address";
        case Type::Mapping: return "mapping(address => uint)";
    }
    return "?";
}

const char* binOpName(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

} // namespace gasrepair
