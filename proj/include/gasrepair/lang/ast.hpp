#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gasrepair {

// Unsigned 256-bit with wrap-around semantics, matching pre-0.8 Solidity.
using U256 = boost::multiprecision::uint256_t;

enum class Type : uint8_t { UInt, Bool, Address, Mapping };

enum class BinOp : uint8_t { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

enum class ExprKind : uint8_t {
    IntLit,
    BoolLit,
    AddressLit,
    Var,
    MappingIndex, // kids[0] = key
    Binary,       // kids[0], kids[1]
    Not,          // kids[0]
    MsgSender,
    MsgValue,
    BalanceOf, // kids[0] = address expr
    Send,      // kids[0] = target, kids[1] = amount; evaluates to bool, never throws
};

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    U256 value = 0;        // IntLit / AddressLit, BoolLit stores 0 or 1
    std::string name;      // Var / MappingIndex
    BinOp op = BinOp::Add; // Binary
    std::vector<Expr> kids;
};

enum class StmtKind : uint8_t {
    VarDecl,  // name, declType, exprs[0] = init
    Assign,   // exprs[0] = lvalue (Var or MappingIndex), exprs[1] = rhs
    If,       // exprs[0] = cond, blocks[0] = then, blocks[1] = else (optional)
    While,    // exprs[0] = cond, blocks[0] = body
    Require,  // exprs[0] = cond
    Return,   // exprs[0] = value (optional)
    ExprStmt, // exprs[0]
};

struct Block;

struct Stmt {
    StmtKind kind = StmtKind::ExprStmt;
    std::string name;
    Type declType = Type::UInt;
    std::vector<Expr> exprs;
    std::vector<Block> blocks;
    int line = 0; // 1-based source line; 0 for synthesized statements
};

struct Block {
    std::vector<Stmt> stmts;
};

struct Param {
    std::string name;
    Type type = Type::UInt;
};

struct Function {
    std::string name;
    std::vector<Param> params;
    bool payable = false;
    std::optional<Type> returnType;
    Block body;
};

struct StateVar {
    std::string name;
    Type type = Type::UInt;
    std::optional<Expr> init; // absent for mappings; scalars default to zero
};

struct Contract {
    std::string name;
    std::vector<StateVar> stateVars;
    std::vector<Function> functions;
    // Bumped by every applied edit; part of NodeId so identities from
    // different edit generations never collide.
    uint32_t generation = 0;
};

// --- Node identity -------------------------------------------------------
//
// A node is addressed by its path of child indices from the contract root.
// Child layout: Contract -> stateVars then functions; StateVar -> init;
// Function -> body; Block -> stmts; Stmt -> exprs then blocks; Expr -> kids.

using NodePath = std::vector<uint32_t>;

struct NodeId {
    NodePath path;
    uint32_t generation = 0;
};

inline bool operator==(const NodeId& a, const NodeId& b) {
    return a.generation == b.generation && a.path == b.path;
}

std::string pathToString(const NodePath& p);
std::optional<NodePath> pathFromString(const std::string& s);
bool isPrefix(const NodePath& pre, const NodePath& full);

using NodeRef = std::variant<Contract*, StateVar*, Function*, Block*, Stmt*, Expr*>;

size_t childCount(NodeRef n);
NodeRef childAt(NodeRef n, uint32_t i);
std::optional<NodeRef> resolve(Contract& c, const NodePath& path);

// Pre-order traversal of the whole tree, visiting every node with its path.
void walk(Contract& c, const std::function<void(NodeRef, const NodePath&)>& fn);

// Scalar attributes of a node, excluding children; two nodes with equal
// labels and pairwise-equal children are structurally equal.
std::string nodeLabel(NodeRef n);

size_t countNodes(const Contract& c);

bool structEq(const Expr& a, const Expr& b);
bool structEq(const Stmt& a, const Stmt& b);
bool structEq(const Block& a, const Block& b);
bool structEq(const Contract& a, const Contract& b);

// --- Expression builders -------------------------------------------------

Expr mkInt(const U256& v);
Expr mkBool(bool b);
Expr mkAddress(const U256& v);
Expr mkVar(const std::string& name);
Expr mkIndex(const std::string& name, Expr key);
Expr mkBin(BinOp op, Expr l, Expr r);
Expr mkNot(Expr e);
Expr mkMsgSender();
Expr mkMsgValue();
Expr mkBalanceOf(Expr addr);
Expr mkSend(Expr target, Expr amount);

Stmt mkAssign(Expr lvalue, Expr rhs);
Stmt mkRequire(Expr cond);
Stmt mkExprStmt(Expr e);
Stmt mkVarDecl(const std::string& name, Type t, Expr init);

const char* typeName(Type t);
const char* binOpName(BinOp op);

} // namespace gasrepair
