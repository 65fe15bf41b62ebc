#include "gasrepair/detect/detect.hpp"

#include "gasrepair/lang/printer.hpp"

#include <algorithm>
#include <set>

namespace gasrepair {

const char* vulnKindCode(VulnKind k) {
    switch (k) {
        case VulnKind::ExceptionDisorder: return "ED";
        case VulnKind::Reentrancy: return "RE";
        case VulnKind::IntegerOverflow: return "IO";
        case VulnKind::OrderDependence: return "TOD";
    }
    return "?";
}

std::optional<VulnKind> vulnKindFromCode(const std::string& code) {
    if (code == "ED") return VulnKind::ExceptionDisorder;
    if (code == "RE") return VulnKind::Reentrancy;
    if (code == "IO") return VulnKind::IntegerOverflow;
    if (code == "TOD") return VulnKind::OrderDependence;
    return std::nullopt;
}

bool operator<(const Vulnerability& a, const Vulnerability& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.location.path < b.location.path;
}

bool operator==(const Vulnerability& a, const Vulnerability& b) {
    return a.kind == b.kind && a.location.path == b.location.path;
}

namespace {

// ---- exception disorder ----

void findDroppedSends(const Contract& c, std::vector<Vulnerability>& out) {
    Contract& mc = const_cast<Contract&>(c);
    walk(mc, [&](NodeRef n, const NodePath& p) {
        if (!std::holds_alternative<Stmt*>(n)) return;
        Stmt* s = std::get<Stmt*>(n);
        if (s->kind == StmtKind::ExprStmt && s->exprs[0].kind == ExprKind::Send)
            out.push_back({VulnKind::ExceptionDisorder,
                           {p, c.generation},
                           "send result is ignored"});
    });
}

// ---- reentrancy ----

struct Action {
    bool isSend = false;
    NodePath where;   // enclosing statement of the send
    std::string slot; // written state variable otherwise
};

struct PathOverflow {};

constexpr size_t kPathCap = 512;

using ActionPath = std::vector<Action>;

struct Flow {
    ActionPath actions;
    bool terminated = false;
};

void exprActions(const Expr& e, const NodePath& stmtPath, ActionPath& out) {
    if (e.kind == ExprKind::Send) out.push_back({true, stmtPath, ""});
    for (const Expr& k : e.kids) exprActions(k, stmtPath, out);
}

std::optional<std::string> writtenStateSlot(const Contract& c, const Stmt& s) {
    if (s.kind != StmtKind::Assign) return std::nullopt;
    const Expr& lv = s.exprs[0];
    for (const StateVar& v : c.stateVars)
        if (v.name == lv.name) return v.name;
    return std::nullopt;
}

std::vector<Flow> blockFlows(const Contract& c, const Block& b, const NodePath& blockPath);

std::vector<Flow> stmtFlows(const Contract& c, const Stmt& s, const NodePath& sp) {
    ActionPath pre;
    for (const Expr& e : s.exprs) exprActions(e, sp, pre);
    auto blockPath = [&](uint32_t i) {
        NodePath p = sp;
        p.push_back(static_cast<uint32_t>(s.exprs.size()) + i);
        return p;
    };
    switch (s.kind) {
        case StmtKind::Assign: {
            Flow f{pre, false};
            if (auto slot = writtenStateSlot(c, s)) f.actions.push_back({false, sp, *slot});
            return {f};
        }
        case StmtKind::Return: return {{pre, true}};
        case StmtKind::If: {
            std::vector<Flow> out;
            std::vector<Flow> thenFlows = blockFlows(c, s.blocks[0], blockPath(0));
            std::vector<Flow> elseFlows =
                s.blocks.size() > 1 ? blockFlows(c, s.blocks[1], blockPath(1))
                                    : std::vector<Flow>{{{}, false}};
            for (const auto& branch : {thenFlows, elseFlows})
                for (const Flow& bf : branch) {
                    Flow f;
                    f.actions = pre;
                    f.actions.insert(f.actions.end(), bf.actions.begin(), bf.actions.end());
                    f.terminated = bf.terminated;
                    out.push_back(std::move(f));
                    if (out.size() > kPathCap) throw PathOverflow{};
                }
            return out;
        }
        case StmtKind::While: {
            // Two summaries: the loop is skipped, or its body runs once.
            std::vector<Flow> out;
            out.push_back({pre, false});
            for (const Flow& bf : blockFlows(c, s.blocks[0], blockPath(0))) {
                Flow f;
                f.actions = pre;
                f.actions.insert(f.actions.end(), bf.actions.begin(), bf.actions.end());
                if (!bf.terminated) // condition is re-checked after the pass
                    f.actions.insert(f.actions.end(), pre.begin(), pre.end());
                f.terminated = bf.terminated;
                out.push_back(std::move(f));
                if (out.size() > kPathCap) throw PathOverflow{};
            }
            return out;
        }
        default: return {{pre, false}};
    }
}

std::vector<Flow> blockFlows(const Contract& c, const Block& b, const NodePath& blockPath) {
    std::vector<Flow> acc{{{}, false}};
    for (size_t i = 0; i < b.stmts.size(); ++i) {
        NodePath sp = blockPath;
        sp.push_back(static_cast<uint32_t>(i));
        std::vector<Flow> next;
        std::vector<Flow> stepFlows = stmtFlows(c, b.stmts[i], sp);
        for (const Flow& base : acc) {
            if (base.terminated) {
                next.push_back(base);
                continue;
            }
            for (const Flow& step : stepFlows) {
                Flow f;
                f.actions = base.actions;
                f.actions.insert(f.actions.end(), step.actions.begin(), step.actions.end());
                f.terminated = step.terminated;
                next.push_back(std::move(f));
                if (next.size() > kPathCap) throw PathOverflow{};
            }
        }
        acc = std::move(next);
    }
    return acc;
}

// Document-order single pass used when the path count explodes.
ActionPath docOrderActions(const Contract& c, const Block& b, const NodePath& blockPath) {
    ActionPath out;
    for (size_t i = 0; i < b.stmts.size(); ++i) {
        NodePath sp = blockPath;
        sp.push_back(static_cast<uint32_t>(i));
        const Stmt& s = b.stmts[i];
        for (const Expr& e : s.exprs) exprActions(e, sp, out);
        if (auto slot = writtenStateSlot(c, s)) out.push_back({false, sp, *slot});
        for (size_t k = 0; k < s.blocks.size(); ++k) {
            NodePath bp = sp;
            bp.push_back(static_cast<uint32_t>(s.exprs.size() + k));
            ActionPath inner = docOrderActions(c, s.blocks[k], bp);
            out.insert(out.end(), inner.begin(), inner.end());
        }
    }
    return out;
}

void findWriteAfterSend(const Contract& c, std::vector<Vulnerability>& out) {
    for (size_t fi = 0; fi < c.functions.size(); ++fi) {
        NodePath bodyPath{static_cast<uint32_t>(c.stateVars.size() + fi), 0};
        std::vector<ActionPath> paths;
        try {
            for (Flow& f : blockFlows(c, c.functions[fi].body, bodyPath))
                paths.push_back(std::move(f.actions));
        } catch (const PathOverflow&) {
            paths = {docOrderActions(c, c.functions[fi].body, bodyPath)};
        }
        std::set<NodePath> flagged;
        for (const ActionPath& path : paths) {
            for (size_t i = 0; i < path.size(); ++i) {
                if (!path[i].isSend) continue;
                for (size_t j = i + 1; j < path.size(); ++j) {
                    if (!path[j].isSend && flagged.insert(path[i].where).second) {
                        out.push_back({VulnKind::Reentrancy,
                                       {path[i].where, c.generation},
                                       "'" + path[j].slot + "' is written after this send"});
                        break;
                    }
                }
            }
        }
    }
}

// ---- integer overflow ----

struct GuardFact {
    const Expr* cond;
    std::set<std::string> deps; // variable names whose write invalidates it
    bool balanceDep = false;    // a send invalidates balance-derived facts
};

void exprDeps(const Expr& e, std::set<std::string>& names, bool& balanceDep) {
    if (e.kind == ExprKind::Var || e.kind == ExprKind::MappingIndex) names.insert(e.name);
    if (e.kind == ExprKind::BalanceOf) balanceDep = true;
    for (const Expr& k : e.kids) exprDeps(k, names, balanceDep);
}

bool isZero(const Expr& e) { return e.kind == ExprKind::IntLit && e.value == 0; }

// (big >= small) stated either way around.
bool provesGe(const Expr& cond, const Expr& big, const Expr& small) {
    if (cond.kind != ExprKind::Binary) return false;
    if (cond.op == BinOp::Ge)
        return structEq(cond.kids[0], big) && structEq(cond.kids[1], small);
    if (cond.op == BinOp::Le)
        return structEq(cond.kids[0], small) && structEq(cond.kids[1], big);
    return false;
}

bool eqZero(const Expr& cond, const Expr& a) {
    if (cond.kind != ExprKind::Binary || cond.op != BinOp::Eq) return false;
    return (structEq(cond.kids[0], a) && isZero(cond.kids[1])) ||
           (isZero(cond.kids[0]) && structEq(cond.kids[1], a));
}

// Does `cond` rule out wrap-around for arithmetic node `use`?
bool guards(const Expr& cond, const Expr& use) {
    const Expr& a = use.kids[0];
    const Expr& b = use.kids[1];
    switch (use.op) {
        case BinOp::Add: return provesGe(cond, use, a) || provesGe(cond, use, b);
        case BinOp::Sub: return provesGe(cond, a, b);
        case BinOp::Mul: {
            if (cond.kind != ExprKind::Binary || cond.op != BinOp::Or) return false;
            const Expr& l = cond.kids[0];
            const Expr& r = cond.kids[1];
            auto divBack = [&](const Expr& eq) {
                // (a*b)/b == a with the product matching the use site
                if (eq.kind != ExprKind::Binary || eq.op != BinOp::Eq) return false;
                for (int side = 0; side < 2; ++side) {
                    const Expr& d = eq.kids[side];
                    const Expr& other = eq.kids[1 - side];
                    if (d.kind == ExprKind::Binary && d.op == BinOp::Div &&
                        structEq(d.kids[0], use) && structEq(d.kids[1], b) &&
                        structEq(other, a))
                        return true;
                }
                return false;
            };
            return (eqZero(l, b) && divBack(r)) || (eqZero(r, b) && divBack(l));
        }
        default: return false;
    }
}

class OverflowScan {
public:
    OverflowScan(const Contract& c, std::vector<Vulnerability>& out) : c_(c), out_(out) {}

    void run() {
        for (size_t fi = 0; fi < c_.functions.size(); ++fi) {
            facts_.clear();
            NodePath bodyPath{static_cast<uint32_t>(c_.stateVars.size() + fi), 0};
            scanBlock(c_.functions[fi].body, bodyPath);
        }
    }

private:
    const Contract& c_;
    std::vector<Vulnerability>& out_;
    std::vector<GuardFact> facts_;

    void addConjuncts(const Expr& cond) {
        if (cond.kind == ExprKind::Binary && cond.op == BinOp::And) {
            addConjuncts(cond.kids[0]);
            addConjuncts(cond.kids[1]);
            return;
        }
        GuardFact f;
        f.cond = &cond;
        exprDeps(cond, f.deps, f.balanceDep);
        facts_.push_back(std::move(f));
    }

    void killName(const std::string& name) {
        facts_.erase(std::remove_if(facts_.begin(), facts_.end(),
                                    [&](const GuardFact& f) { return f.deps.count(name) > 0; }),
                     facts_.end());
    }

    void killBalances() {
        facts_.erase(std::remove_if(facts_.begin(), facts_.end(),
                                    [](const GuardFact& f) { return f.balanceDep; }),
                     facts_.end());
    }

    void collectWrites(const Block& b, std::set<std::string>& names, bool& sends) {
        for (const Stmt& s : b.stmts) {
            if (s.kind == StmtKind::Assign) names.insert(s.exprs[0].name);
            if (s.kind == StmtKind::VarDecl) names.insert(s.name);
            for (const Expr& e : s.exprs)
                if (hasSend(e)) sends = true;
            for (const Block& inner : s.blocks) collectWrites(inner, names, sends);
        }
    }

    static bool hasSend(const Expr& e) {
        if (e.kind == ExprKind::Send) return true;
        for (const Expr& k : e.kids) if (hasSend(k)) return true;
        return false;
    }

    void checkUses(const Expr& e, const NodePath& p) {
        if (e.kind == ExprKind::Binary &&
            (e.op == BinOp::Add || e.op == BinOp::Sub || e.op == BinOp::Mul) &&
            e.kids[0].kind != ExprKind::IntLit && e.kids[1].kind != ExprKind::IntLit) {
            bool safe = false;
            for (const GuardFact& f : facts_)
                if (guards(*f.cond, e)) safe = true;
            if (!safe) {
                const char* what = e.op == BinOp::Add ? "addition"
                                   : e.op == BinOp::Sub ? "subtraction"
                                                        : "multiplication";
                out_.push_back({VulnKind::IntegerOverflow,
                                {p, c_.generation},
                                std::string("unguarded ") + what + " '" + printExpr(e) + "'"});
            }
        }
        for (size_t i = 0; i < e.kids.size(); ++i) {
            NodePath kp = p;
            kp.push_back(static_cast<uint32_t>(i));
            checkUses(e.kids[i], kp);
        }
    }

    void scanBlock(const Block& b, const NodePath& blockPath) {
        size_t mark = facts_.size();
        for (size_t i = 0; i < b.stmts.size(); ++i) {
            NodePath sp = blockPath;
            sp.push_back(static_cast<uint32_t>(i));
            scanStmt(b.stmts[i], sp);
        }
        facts_.resize(std::min(facts_.size(), mark));
    }

    void scanStmt(const Stmt& s, const NodePath& sp) {
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
        auto condSends = [&] {
            for (const Expr& e : s.exprs)
                if (hasSend(e)) return true;
            return false;
        };
        switch (s.kind) {
            case StmtKind::Require:
                // A check guards the arithmetic used to state it.
                addConjuncts(s.exprs[0]);
                checkUses(s.exprs[0], exprPath(0));
                if (condSends()) killBalances();
                break;
            case StmtKind::If: {
                std::set<std::string> written;
                bool innerSends = false;
                for (const Block& blk : s.blocks) collectWrites(blk, written, innerSends);
                size_t mark = facts_.size();
                addConjuncts(s.exprs[0]); // holds inside the then branch
                checkUses(s.exprs[0], exprPath(0));
                if (condSends()) killBalances();
                scanBlock(s.blocks[0], blockPath(0));
                facts_.resize(std::min(facts_.size(), mark));
                if (s.blocks.size() > 1) scanBlock(s.blocks[1], blockPath(1));
                for (const std::string& n : written) killName(n);
                if (innerSends) killBalances();
                break;
            }
            case StmtKind::While: {
                std::set<std::string> written;
                bool innerSends = false;
                collectWrites(s.blocks[0], written, innerSends);
                // Facts about loop-written variables do not survive re-entry.
                for (const std::string& n : written) killName(n);
                if (innerSends) killBalances();
                size_t mark = facts_.size();
                addConjuncts(s.exprs[0]); // every evaluation re-establishes it
                checkUses(s.exprs[0], exprPath(0));
                if (condSends()) killBalances();
                for (const std::string& n : written) killName(n);
                scanBlock(s.blocks[0], blockPath(0));
                facts_.resize(std::min(facts_.size(), mark));
                break;
            }
            default:
                for (size_t i = 0; i < s.exprs.size(); ++i) checkUses(s.exprs[i], exprPath(i));
                if (condSends()) killBalances();
                if (s.kind == StmtKind::VarDecl) killName(s.name);
                if (s.kind == StmtKind::Assign) killName(s.exprs[0].name);
                break;
        }
    }
};

// ---- order dependence ----

bool readsName(const Expr& e, const std::string& name, const std::set<std::string>& tainted) {
    if ((e.kind == ExprKind::Var || e.kind == ExprKind::MappingIndex) &&
        (e.name == name || tainted.count(e.name)))
        return true;
    for (const Expr& k : e.kids)
        if (readsName(k, name, tainted)) return true;
    return false;
}

void findOrderDependence(const Contract& c, std::vector<Vulnerability>& out) {
    for (const StateVar& v : c.stateVars) {
        if (v.type != Type::UInt) continue; // per-account mappings are inherently ordered
        std::set<size_t> writers;
        std::map<size_t, NodePath> senders; // function -> first dependent send stmt
        for (size_t fi = 0; fi < c.functions.size(); ++fi) {
            std::set<std::string> tainted;
            NodePath bodyPath{static_cast<uint32_t>(c.stateVars.size() + fi), 0};
            std::function<void(const Block&, const NodePath&)> scan =
                [&](const Block& b, const NodePath& bp) {
                    for (size_t i = 0; i < b.stmts.size(); ++i) {
                        const Stmt& s = b.stmts[i];
                        NodePath sp = bp;
                        sp.push_back(static_cast<uint32_t>(i));
                        std::function<void(const Expr&)> scanSends = [&](const Expr& e) {
                            if (e.kind == ExprKind::Send &&
                                readsName(e.kids[1], v.name, tainted) &&
                                !senders.count(fi))
                                senders[fi] = sp;
                            for (const Expr& k : e.kids) scanSends(k);
                        };
                        for (const Expr& e : s.exprs) scanSends(e);
                        if (s.kind == StmtKind::VarDecl &&
                            readsName(s.exprs[0], v.name, tainted))
                            tainted.insert(s.name);
                        if (s.kind == StmtKind::Assign) {
                            const Expr& lv = s.exprs[0];
                            if (lv.kind == ExprKind::Var && lv.name == v.name)
                                writers.insert(fi);
                            else if (lv.kind == ExprKind::Var &&
                                     readsName(s.exprs[1], v.name, tainted))
                                tainted.insert(lv.name);
                        }
                        for (size_t k = 0; k < s.blocks.size(); ++k) {
                            NodePath kp = sp;
                            kp.push_back(static_cast<uint32_t>(s.exprs.size() + k));
                            scan(s.blocks[k], kp);
                        }
                    }
                };
            scan(c.functions[fi].body, bodyPath);
        }
        for (const auto& [fi, where] : senders) {
            bool foreignWriter = false;
            for (size_t w : writers)
                if (w != fi) foreignWriter = true;
            if (foreignWriter)
                out.push_back({VulnKind::OrderDependence,
                               {where, c.generation},
                               "send amount depends on '" + v.name +
                                   "' which another function rewrites"});
        }
    }
}

} // namespace

std::vector<Vulnerability> detect(const Contract& c, const std::vector<VulnKind>& kinds) {
    std::vector<Vulnerability> found;
    auto wants = [&](VulnKind k) {
        return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    };
    if (wants(VulnKind::ExceptionDisorder)) findDroppedSends(c, found);
    if (wants(VulnKind::Reentrancy)) findWriteAfterSend(c, found);
    if (wants(VulnKind::IntegerOverflow)) OverflowScan(c, found).run();
    if (wants(VulnKind::OrderDependence)) findOrderDependence(c, found);
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

std::vector<Vulnerability> detectAll(const Contract& c) {
    return detect(c, {VulnKind::ExceptionDisorder, VulnKind::Reentrancy,
                      VulnKind::IntegerOverflow, VulnKind::OrderDependence});
}

} // namespace gasrepair
