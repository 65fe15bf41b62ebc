#include "gasrepair/lang/typecheck.hpp"

#include <algorithm>
#include <set>

namespace gasrepair {

namespace {

class Checker {
public:
    explicit Checker(const Contract& c) : c_(c) {}

    CheckResult run() {
        checkContractShape();
        for (size_t fi = 0; fi < c_.functions.size(); ++fi) {
            const Function& f = c_.functions[fi];
            fn_ = &f;
            scope_.clear();
            for (const StateVar& v : c_.stateVars)
                scope_.push_back({v.name, v.type, VarKind::State});
            NodePath fnPath{static_cast<uint32_t>(c_.stateVars.size() + fi)};
            for (const Param& p : f.params) {
                if (lookup(p.name))
                    err(fnPath, "duplicate name '" + p.name + "' in function " + f.name);
                scope_.push_back({p.name, p.type, VarKind::Param});
            }
            NodePath bodyPath = fnPath;
            bodyPath.push_back(0);
            checkBlock(f.body, bodyPath);
        }
        return std::move(result_);
    }

private:
    const Contract& c_;
    const Function* fn_ = nullptr;
    std::vector<ScopeVar> scope_;
    CheckResult result_;

    void err(const NodePath& path, const std::string& msg) {
        result_.errors.push_back({NodeId{path, c_.generation}, msg});
    }

    const ScopeVar* lookup(const std::string& name) const {
        for (const ScopeVar& v : scope_)
            if (v.name == name) return &v;
        return nullptr;
    }

    void checkContractShape() {
        std::set<std::string> names;
        for (size_t i = 0; i < c_.stateVars.size(); ++i) {
            const StateVar& v = c_.stateVars[i];
            NodePath p{static_cast<uint32_t>(i)};
            if (!names.insert(v.name).second) err(p, "duplicate state variable '" + v.name + "'");
            if (v.type == Type::Mapping && v.init)
                err(p, "mapping '" + v.name + "' cannot have an initializer");
            if (v.init) {
                // Initializers run once at deployment, before any call exists.
                NodePath ip = p;
                ip.push_back(0);
                if (v.init->kind != ExprKind::IntLit && v.init->kind != ExprKind::BoolLit &&
                    v.init->kind != ExprKind::AddressLit) {
                    err(ip, "initializer for '" + v.name + "' must be a literal");
                    continue;
                }
                std::vector<ScopeVar> saved;
                saved.swap(scope_);
                auto t = typeOf(*v.init, ip);
                if (t && *t != v.type)
                    err(ip, "initializer type mismatch for '" + v.name + "'");
                scope_.swap(saved);
            }
        }
        std::set<std::string> fns = names; // function names share the contract namespace
        for (size_t i = 0; i < c_.functions.size(); ++i) {
            NodePath p{static_cast<uint32_t>(c_.stateVars.size() + i)};
            if (!fns.insert(c_.functions[i].name).second)
                err(p, "duplicate name '" + c_.functions[i].name + "'");
        }
    }

    void checkBlock(const Block& b, const NodePath& blockPath) {
        size_t mark = scope_.size();
        for (size_t i = 0; i < b.stmts.size(); ++i) {
            NodePath sp = blockPath;
            sp.push_back(static_cast<uint32_t>(i));
            result_.analysis.scopeBefore[sp] = scope_;
            checkStmt(b.stmts[i], sp);
        }
        result_.analysis.scopeAtEnd[blockPath] = scope_;
        scope_.resize(mark); // locals die with their block
    }

    void checkStmt(const Stmt& s, const NodePath& sp) {
        auto exprPath = [&sp](uint32_t i) {
            NodePath p = sp;
            p.push_back(i);
            return p;
        };
        auto blockPath = [&](uint32_t i) {
            NodePath p = sp;
            p.push_back(static_cast<uint32_t>(s.exprs.size()) + i);
            return p;
        };
        switch (s.kind) {
            case StmtKind::VarDecl: {
                auto t = typeOf(s.exprs[0], exprPath(0));
                if (lookup(s.name)) err(sp, "redeclaration of '" + s.name + "'");
                if (t && *t != s.declType)
                    err(sp, "initializer type mismatch for '" + s.name + "'");
                scope_.push_back({s.name, s.declType, VarKind::Local});
                break;
            }
            case StmtKind::Assign: {
                const Expr& lv = s.exprs[0];
                std::optional<Type> lt;
                if (lv.kind == ExprKind::Var) {
                    const ScopeVar* v = lookup(lv.name);
                    if (!v) {
                        err(exprPath(0), "unknown variable '" + lv.name + "'");
                    } else if (v->type == Type::Mapping) {
                        err(exprPath(0), "cannot assign a whole mapping");
                    } else {
                        lt = v->type;
                        result_.analysis.exprTypes[exprPath(0)] = *lt;
                    }
                } else if (lv.kind == ExprKind::MappingIndex) {
                    lt = typeOf(lv, exprPath(0));
                } else {
                    err(exprPath(0), "assignment target must be a variable or mapping element");
                }
                auto rt = typeOf(s.exprs[1], exprPath(1));
                if (lt && rt && *lt != *rt) err(sp, "assignment type mismatch");
                break;
            }
            case StmtKind::If: {
                requireBool(s.exprs[0], exprPath(0), "if condition");
                checkBlock(s.blocks[0], blockPath(0));
                if (s.blocks.size() > 1) checkBlock(s.blocks[1], blockPath(1));
                break;
            }
            case StmtKind::While: {
                requireBool(s.exprs[0], exprPath(0), "while condition");
                checkBlock(s.blocks[0], blockPath(0));
                break;
            }
            case StmtKind::Require:
                requireBool(s.exprs[0], exprPath(0), "require condition");
                break;
            case StmtKind::Return: {
                if (s.exprs.empty()) {
                    if (fn_->returnType)
                        err(sp, "function " + fn_->name + " must return a value");
                } else {
                    auto t = typeOf(s.exprs[0], exprPath(0));
                    if (!fn_->returnType)
                        err(sp, "function " + fn_->name + " does not return a value");
                    else if (t && *t != *fn_->returnType)
                        err(sp, "return type mismatch in " + fn_->name);
                }
                break;
            }
            case StmtKind::ExprStmt:
                typeOf(s.exprs[0], exprPath(0));
                break;
        }
    }

    void requireBool(const Expr& e, const NodePath& p, const std::string& what) {
        auto t = typeOf(e, p);
        if (t && *t != Type::Bool) err(p, what + " must be bool");
    }

    std::optional<Type> typeOf(const Expr& e, const NodePath& p) {
        auto kid = [&p](uint32_t i) {
            NodePath q = p;
            q.push_back(i);
            return q;
        };
        std::optional<Type> out;
        switch (e.kind) {
            case ExprKind::IntLit: out = Type::UInt; break;
            case ExprKind::BoolLit: out = Type::Bool; break;
            case ExprKind::AddressLit: out = Type::Address; break;
            case ExprKind::Var: {
                const ScopeVar* v = lookup(e.name);
                if (!v) {
                    err(p, "unknown variable '" + e.name + "'");
                } else if (v->type == Type::Mapping) {
                    err(p, "mapping '" + e.name + "' needs an index");
                } else {
                    out = v->type;
                }
                break;
            }
            case ExprKind::MappingIndex: {
                const ScopeVar* v = lookup(e.name);
                if (!v)
                    err(p, "unknown variable '" + e.name + "'");
                else if (v->type != Type::Mapping)
                    err(p, "'" + e.name + "' is not a mapping");
                auto kt = typeOf(e.kids[0], kid(0));
                if (kt && *kt != Type::Address) err(kid(0), "mapping keys are addresses");
                if (v && v->type == Type::Mapping) out = Type::UInt;
                break;
            }
            case ExprKind::Binary: {
                auto lt = typeOf(e.kids[0], kid(0));
                auto rt = typeOf(e.kids[1], kid(1));
                switch (e.op) {
                    case BinOp::Add:
                    case BinOp::Sub:
                    case BinOp::Mul:
                    case BinOp::Div:
                        if (lt && *lt != Type::UInt) err(kid(0), "arithmetic needs uint operands");
                        else if (rt && *rt != Type::UInt)
                            err(kid(1), "arithmetic needs uint operands");
                        else if (lt && rt)
                            out = Type::UInt;
                        break;
                    case BinOp::Lt:
                    case BinOp::Le:
                    case BinOp::Gt:
                    case BinOp::Ge:
                        if (lt && *lt != Type::UInt) err(kid(0), "comparison needs uint operands");
                        else if (rt && *rt != Type::UInt)
                            err(kid(1), "comparison needs uint operands");
                        else if (lt && rt)
                            out = Type::Bool;
                        break;
                    case BinOp::Eq:
                    case BinOp::Ne:
                        if (lt && rt && *lt != *rt) err(p, "equality operands must share a type");
                        else if (lt && rt)
                            out = Type::Bool;
                        break;
                    case BinOp::And:
                    case BinOp::Or:
                        if (lt && *lt != Type::Bool) err(kid(0), "logical operands must be bool");
                        else if (rt && *rt != Type::Bool)
                            err(kid(1), "logical operands must be bool");
                        else if (lt && rt)
                            out = Type::Bool;
                        break;
                }
                break;
            }
            case ExprKind::Not: {
                auto t = typeOf(e.kids[0], kid(0));
                if (t && *t != Type::Bool) err(kid(0), "'!' needs a bool operand");
                else if (t)
                    out = Type::Bool;
                break;
            }
            case ExprKind::MsgSender: out = Type::Address; break;
            case ExprKind::MsgValue: out = Type::UInt; break;
            case ExprKind::BalanceOf: {
                auto t = typeOf(e.kids[0], kid(0));
                if (t && *t != Type::Address) err(kid(0), "balance() takes an address");
                else if (t)
                    out = Type::UInt;
                break;
            }
            case ExprKind::Send: {
                auto tt = typeOf(e.kids[0], kid(0));
                auto at = typeOf(e.kids[1], kid(1));
                if (tt && *tt != Type::Address) err(kid(0), "send target must be an address");
                if (at && *at != Type::UInt) err(kid(1), "send amount must be uint");
                if (tt && at && *tt == Type::Address && *at == Type::UInt) out = Type::Bool;
                break;
            }
        }
        if (out) result_.analysis.exprTypes[p] = *out;
        return out;
    }
};

} // namespace

CheckResult typecheck(const Contract& c) { return Checker(c).run(); }

std::optional<NodePath> enclosingStmtPath(const Contract& c, const NodePath& path) {
    std::optional<NodePath> best;
    NodePath prefix;
    NodeRef cur = const_cast<Contract*>(&c);
    for (size_t i = 0; i + 1 <= path.size(); ++i) {
        if (path[i] >= childCount(cur)) return best;
        cur = childAt(cur, path[i]);
        prefix.push_back(path[i]);
        if (prefix.size() < path.size() && std::holds_alternative<Stmt*>(cur)) best = prefix;
    }
    return best;
}

Sites mutableSites(const Contract& c, const std::vector<NodePath>& hints) {
    Sites sites;
    Contract& mc = const_cast<Contract&>(c);
    uint32_t fnStart = static_cast<uint32_t>(c.stateVars.size());
    walk(mc, [&](NodeRef n, const NodePath& path) {
        if (path.empty() || path[0] < fnStart) return; // sites live in function bodies
        if (std::holds_alternative<Stmt*>(n)) {
            sites.stmtSites.push_back({path, c.generation});
        } else if (std::holds_alternative<Expr*>(n)) {
            // Exclude lvalue roots: kids of an Assign's slot 0 stay eligible.
            auto parent = resolve(mc, NodePath(path.begin(), path.end() - 1));
            if (parent && std::holds_alternative<Stmt*>(*parent)) {
                Stmt* ps = std::get<Stmt*>(*parent);
                if (ps->kind == StmtKind::Assign && path.back() == 0) return;
            }
            sites.exprSites.push_back({path, c.generation});
        }
    });
    if (!hints.empty()) {
        auto hinted = [&hints](const NodeId& id) {
            return std::any_of(hints.begin(), hints.end(), [&id](const NodePath& h) {
                return isPrefix(h, id.path) || isPrefix(id.path, h);
            });
        };
        std::stable_partition(sites.stmtSites.begin(), sites.stmtSites.end(), hinted);
        std::stable_partition(sites.exprSites.begin(), sites.exprSites.end(), hinted);
    }
    return sites;
}

} // namespace gasrepair
