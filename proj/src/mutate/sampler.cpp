#include "gasrepair/mutate/sampler.hpp"

#include "gasrepair/lang/printer.hpp"

#include <algorithm>

namespace gasrepair {

const std::vector<SpaceDef>& allSpaces() {
    static const std::vector<SpaceDef> spaces = {
        {"S1", {EditKind::Move}},
        {"S2", {EditKind::Replace}},
        {"S3", {EditKind::Insert}},
        {"S4", {EditKind::Move, EditKind::Replace}},
        {"S5", {EditKind::Move, EditKind::Insert}},
        {"S6", {EditKind::Replace, EditKind::Insert}},
        {"S7", {EditKind::Move, EditKind::Replace, EditKind::Insert}},
    };
    return spaces;
}

size_t spaceCount() { return allSpaces().size(); }

bool spaceAccepts(size_t spaceIdx, const std::set<EditKind>& sigma) {
    return allSpaces()[spaceIdx].ops == sigma;
}

bool spaceEligible(size_t spaceIdx, const std::set<EditKind>& sigma) {
    const std::set<EditKind>& ops = allSpaces()[spaceIdx].ops;
    if (!std::includes(ops.begin(), ops.end(), sigma.begin(), sigma.end())) return false;
    return ops.size() - sigma.size() <= 1;
}

std::vector<EditKind> nextOps(size_t spaceIdx, const std::set<EditKind>& sigma) {
    const std::set<EditKind>& ops = allSpaces()[spaceIdx].ops;
    std::vector<EditKind> missing;
    std::set_difference(ops.begin(), ops.end(), sigma.begin(), sigma.end(),
                        std::back_inserter(missing));
    if (!missing.empty()) return missing;
    return {ops.begin(), ops.end()};
}

namespace {

void exprNames(const Expr& e, std::set<std::string>& out) {
    if (e.kind == ExprKind::Var || e.kind == ExprKind::MappingIndex) out.insert(e.name);
    for (const Expr& k : e.kids) exprNames(k, out);
}

bool overlaps(const NodePath& p, const std::vector<NodePath>& hints) {
    for (const NodePath& h : hints)
        if (isPrefix(h, p) || isPrefix(p, h)) return true;
    return false;
}

struct Anchor {
    NodePath block;
    uint32_t idx = 0;

    NodePath position() const {
        NodePath p = block;
        p.push_back(idx);
        return p;
    }
};

// Every insertion slot in every function body, document order.
std::vector<Anchor> collectAnchors(const Contract& c) {
    std::vector<Anchor> out;
    Contract& mc = const_cast<Contract&>(c);
    walk(mc, [&](NodeRef n, const NodePath& p) {
        if (!std::holds_alternative<Block*>(n)) return;
        if (p.empty() || p[0] < mc.stateVars.size()) return;
        Block* b = std::get<Block*>(n);
        for (uint32_t i = 0; i <= b->stmts.size(); ++i) out.push_back({p, i});
    });
    return out;
}

std::vector<ScopeVar> scopeAt(const Analysis& an, const Anchor& a) {
    NodePath stmtPath = a.block;
    stmtPath.push_back(a.idx);
    auto sb = an.scopeBefore.find(stmtPath);
    if (sb != an.scopeBefore.end()) return sb->second;
    auto se = an.scopeAtEnd.find(a.block);
    if (se != an.scopeAtEnd.end()) return se->second;
    return {};
}

// Wrapping arithmetic nodes a guard can be built for.
void collectArith(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == ExprKind::Binary &&
        (e.op == BinOp::Add || e.op == BinOp::Sub || e.op == BinOp::Mul) &&
        e.kids[0].kind != ExprKind::IntLit && e.kids[1].kind != ExprKind::IntLit)
        out.push_back(&e);
    for (const Expr& k : e.kids) collectArith(k, out);
}

void collectArithInBlock(const Block& b, std::vector<const Expr*>& out) {
    for (const Stmt& s : b.stmts) {
        for (const Expr& e : s.exprs) collectArith(e, out);
        for (const Block& inner : s.blocks) collectArithInBlock(inner, out);
    }
}

std::vector<Stmt> guardTemplates(const Expr& use) {
    const Expr& a = use.kids[0];
    const Expr& b = use.kids[1];
    std::vector<Stmt> out;
    switch (use.op) {
        case BinOp::Add:
            out.push_back(mkRequire(mkBin(BinOp::Ge, use, a)));
            out.push_back(mkRequire(mkBin(BinOp::Ge, use, b)));
            break;
        case BinOp::Sub: out.push_back(mkRequire(mkBin(BinOp::Ge, a, b))); break;
        case BinOp::Mul:
            out.push_back(mkRequire(
                mkBin(BinOp::Or, mkBin(BinOp::Eq, b, mkInt(0)),
                      mkBin(BinOp::Eq, mkBin(BinOp::Div, use, b), a))));
            break;
        default: break;
    }
    return out;
}

std::vector<EditOp> replaceEdits(const Contract& c, const Analysis& an, const Sites& sites) {
    std::vector<EditOp> out;
    Contract& mc = const_cast<Contract&>(c);
    for (const NodeId& site : sites.exprSites) {
        auto ref = resolve(mc, site.path);
        if (!ref || !std::holds_alternative<Expr*>(*ref)) continue;
        const Expr& orig = *std::get<Expr*>(*ref);
        auto ty = an.exprTypes.find(site.path);
        if (ty == an.exprTypes.end()) continue;
        std::vector<Expr> cands;

        if (orig.kind == ExprKind::Binary) {
            static const BinOp arith[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
            static const BinOp rel[] = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                        BinOp::Ge, BinOp::Eq, BinOp::Ne};
            static const BinOp logic[] = {BinOp::And, BinOp::Or};
            auto inFamily = [&](const BinOp* fam, size_t n) {
                for (size_t i = 0; i < n; ++i)
                    if (fam[i] == orig.op) return true;
                return false;
            };
            auto addFamily = [&](const BinOp* fam, size_t n) {
                for (size_t i = 0; i < n; ++i) {
                    if (fam[i] == orig.op) continue;
                    Expr e = orig;
                    e.op = fam[i];
                    cands.push_back(std::move(e));
                }
            };
            if (inFamily(arith, 4)) addFamily(arith, 4);
            if (inFamily(rel, 6)) addFamily(rel, 6);
            if (inFamily(logic, 2)) addFamily(logic, 2);
            Expr swapped = orig;
            std::swap(swapped.kids[0], swapped.kids[1]);
            cands.push_back(std::move(swapped));
        }

        auto stmtPath = enclosingStmtPath(c, site.path);
        if (stmtPath) {
            auto sb = an.scopeBefore.find(*stmtPath);
            if (sb != an.scopeBefore.end())
                for (const ScopeVar& v : sb->second)
                    if (v.type == ty->second) cands.push_back(mkVar(v.name));
        }
        switch (ty->second) {
            case Type::UInt:
                cands.push_back(mkInt(0));
                cands.push_back(mkInt(1));
                cands.push_back(mkMsgValue());
                break;
            case Type::Bool:
                cands.push_back(mkBool(true));
                cands.push_back(mkBool(false));
                break;
            case Type::Address: cands.push_back(mkMsgSender()); break;
            default: break;
        }

        std::set<std::string> dedup{printExpr(orig)};
        for (Expr& cand : cands) {
            if (!dedup.insert(printExpr(cand)).second) continue;
            EditOp e;
            e.kind = EditKind::Replace;
            e.src = site.path;
            e.expr = std::move(cand);
            out.push_back(std::move(e));
        }
    }

    // A dropped send can be promoted to a checked one.
    for (const NodeId& site : sites.stmtSites) {
        auto ref = resolve(mc, site.path);
        if (!ref || !std::holds_alternative<Stmt*>(*ref)) continue;
        Stmt* s = std::get<Stmt*>(*ref);
        if (s->kind != StmtKind::ExprStmt || s->exprs[0].kind != ExprKind::Send) continue;
        EditOp e;
        e.kind = EditKind::Replace;
        e.src = site.path;
        e.stmt = mkRequire(s->exprs[0]);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<EditOp> insertEdits(const Contract& c, const Analysis& an) {
    std::vector<EditOp> out;
    std::vector<Anchor> anchors = collectAnchors(c);
    for (const Anchor& a : anchors) {
        std::vector<ScopeVar> scope = scopeAt(an, a);
        std::set<std::string> inScope;
        for (const ScopeVar& v : scope) inScope.insert(v.name);
        for (const StateVar& v : c.stateVars) inScope.insert(v.name);

        std::vector<Stmt> stmts;
        for (const ScopeVar& v : scope) {
            switch (v.type) {
                case Type::UInt:
                    stmts.push_back(mkAssign(mkVar(v.name), mkInt(0)));
                    stmts.push_back(mkAssign(mkVar(v.name), mkInt(1)));
                    break;
                case Type::Bool:
                    stmts.push_back(mkAssign(mkVar(v.name), mkBool(true)));
                    stmts.push_back(mkAssign(mkVar(v.name), mkBool(false)));
                    break;
                case Type::Address:
                    stmts.push_back(mkAssign(mkVar(v.name), mkMsgSender()));
                    break;
                default: break;
            }
        }
        for (const StateVar& v : c.stateVars)
            if (v.type == Type::Mapping)
                stmts.push_back(mkAssign(mkIndex(v.name, mkMsgSender()), mkInt(0)));

        // Guards for arithmetic reachable from this slot's function.
        if (!a.block.empty() && a.block[0] >= c.stateVars.size()) {
            const Function& fn = c.functions[a.block[0] - c.stateVars.size()];
            std::vector<const Expr*> uses;
            collectArithInBlock(fn.body, uses);
            for (const Expr* use : uses) {
                std::set<std::string> names;
                exprNames(*use, names);
                bool visible = std::all_of(names.begin(), names.end(), [&](const std::string& n) {
                    return inScope.count(n) > 0;
                });
                if (!visible) continue;
                for (Stmt& g : guardTemplates(*use)) stmts.push_back(std::move(g));
            }
        }

        std::set<std::string> dedup;
        for (Stmt& s : stmts) {
            if (!dedup.insert(printStmt(s, 0)).second) continue;
            EditOp e;
            e.kind = EditKind::Insert;
            e.dst = a.position();
            e.stmt = std::move(s);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<EditOp> moveEdits(const Contract& c, const Sites& sites) {
    std::vector<EditOp> out;
    std::vector<Anchor> anchors = collectAnchors(c);
    for (const NodeId& site : sites.stmtSites) {
        const NodePath& src = site.path;
        NodePath srcParent(src.begin(), src.end() - 1);
        uint32_t srcIdx = src.back();
        for (const Anchor& a : anchors) {
            if (a.block[0] != src[0]) continue; // keep moves within one function
            if (isPrefix(src, a.block)) continue;
            if (a.block == srcParent && (a.idx == srcIdx || a.idx == srcIdx + 1)) continue;
            EditOp e;
            e.kind = EditKind::Move;
            e.src = src;
            e.dst = a.position();
            out.push_back(std::move(e));
        }
    }
    return out;
}

} // namespace

std::vector<EditOp> enumerateEdits(const Contract& c, EditKind kind,
                                   const std::vector<NodePath>& hints) {
    CheckResult check = typecheck(c);
    if (!check.ok()) return {};
    Sites sites = mutableSites(c, hints);
    std::vector<EditOp> out;
    switch (kind) {
        case EditKind::Replace: out = replaceEdits(c, check.analysis, sites); break;
        case EditKind::Insert: out = insertEdits(c, check.analysis); break;
        case EditKind::Move: out = moveEdits(c, sites); break;
    }
    std::stable_partition(out.begin(), out.end(), [&](const EditOp& e) {
        const NodePath& where = e.kind == EditKind::Insert ? e.dst : e.src;
        return overlaps(where, hints) ||
               (e.kind == EditKind::Move && overlaps(e.dst, hints));
    });
    return out;
}

std::optional<MutantResult> sampleMutant(size_t spaceIdx, const MutateRequest& req) {
    std::set<EditKind> sigma = req.history.kinds();
    if (!spaceEligible(spaceIdx, sigma)) return std::nullopt;

    std::set<uint64_t> chainHashes;
    {
        Contract t = *req.base;
        chainHashes.insert(contentHash(t));
        for (const EditOp& e : req.history.edits) {
            if (!applyEdit(t, e)) return std::nullopt;
            chainHashes.insert(contentHash(t));
        }
    }

    std::vector<EditOp> pool;
    for (EditKind op : nextOps(spaceIdx, sigma)) {
        std::vector<EditOp> part = enumerateEdits(*req.current, op, req.hints);
        pool.insert(pool.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
    }
    auto hinted = std::stable_partition(pool.begin(), pool.end(), [&](const EditOp& e) {
        const NodePath& where = e.kind == EditKind::Insert ? e.dst : e.src;
        return overlaps(where, req.hints);
    });
    Rng rng(req.seed);
    auto shuffleRange = [&rng](std::vector<EditOp>::iterator b, std::vector<EditOp>::iterator e) {
        for (size_t i = static_cast<size_t>(e - b); i > 1; --i)
            std::iter_swap(b + static_cast<ptrdiff_t>(i - 1),
                           b + static_cast<ptrdiff_t>(rng.below(i)));
    };
    shuffleRange(pool.begin(), hinted);
    shuffleRange(hinted, pool.end());

    for (const EditOp& edit : pool) {
        Contract cand = *req.current;
        if (!applyEdit(cand, edit)) continue;
        if (!typecheck(cand).ok()) continue;
        uint64_t h = contentHash(cand);
        if (chainHashes.count(h)) continue;
        if (req.seen && req.seen->count(h)) continue;
        if (req.seen) req.seen->insert(h);
        MutantResult res;
        res.tree = std::move(cand);
        res.patch = req.history;
        res.patch.baseHash = contentHash(*req.base);
        res.patch.edits.push_back(edit);
        return res;
    }
    return std::nullopt;
}

size_t mutationDistance(const Contract& base, const Contract& candidate) {
    return treeDiff(base, candidate);
}

} // namespace gasrepair
