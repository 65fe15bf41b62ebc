#include "gasrepair/gas/paths.hpp"

#include "gasrepair/lang/printer.hpp"
#include "gasrepair/lang/typecheck.hpp"
#include "gasrepair/vm/interp.hpp"

#include <algorithm>

namespace gasrepair {

namespace {

struct EnumCtx {
    std::map<NodePath, std::string> loopVar;
    size_t cap = 512;
    size_t pushes = 0;

    void countPush() {
        if (++pushes > cap * 64) throw PathExplosion(cap);
    }
};

struct PState {
    std::vector<AbsStep> steps;
    std::vector<SigStep> sig;
    std::vector<std::string> loopVars;
    std::vector<std::vector<std::string>> scopes;
    CountExpr decls;
    std::vector<std::pair<std::string, bool>> mult;
    bool terminated = false;

    bool isLocal(const std::string& name) const {
        for (const auto& sc : scopes)
            if (std::find(sc.begin(), sc.end(), name) != sc.end()) return true;
        return false;
    }

    void push(OpKind op) { steps.push_back({op, mult, {}, false}); }
};

std::string trimmedStmt(const Stmt& s) {
    std::string t = printStmt(s, 0);
    while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
    return t;
}

std::optional<bool> literalTruth(const Expr& e) {
    if (e.kind == ExprKind::BoolLit || e.kind == ExprKind::IntLit)
        return e.value != 0;
    return std::nullopt;
}

void exprSteps(const Expr& e, PState& st) {
    switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::BoolLit:
        case ExprKind::AddressLit: st.push(OpKind::Literal); return;
        case ExprKind::Var:
            st.push(st.isLocal(e.name) ? OpKind::LocalRead : OpKind::StateRead);
            return;
        case ExprKind::MappingIndex:
            st.push(OpKind::MappingRead);
            exprSteps(e.kids[0], st);
            return;
        case ExprKind::Binary: {
            OpKind op;
            switch (e.op) {
                case BinOp::Add:
                case BinOp::Sub: op = OpKind::Arith; break;
                case BinOp::Mul:
                case BinOp::Div: op = OpKind::MulDiv; break;
                case BinOp::And:
                case BinOp::Or: op = OpKind::Logic; break;
                default: op = OpKind::Compare; break;
            }
            st.push(op);
            exprSteps(e.kids[0], st);
            exprSteps(e.kids[1], st);
            return;
        }
        case ExprKind::Not:
            st.push(OpKind::NotOp);
            exprSteps(e.kids[0], st);
            return;
        case ExprKind::MsgSender:
        case ExprKind::MsgValue: st.push(OpKind::EnvRead); return;
        case ExprKind::BalanceOf:
            st.push(OpKind::BalanceRead);
            exprSteps(e.kids[0], st);
            return;
        case ExprKind::Send:
            st.push(OpKind::SendCall);
            exprSteps(e.kids[0], st);
            exprSteps(e.kids[1], st);
            return;
    }
}

// Statically decidable store pricing: a literal zero is the only value that
// earns the cheap write.
OpKind storeKind(const Expr& rhs) {
    if (rhs.kind == ExprKind::IntLit && rhs.value == 0) return OpKind::SstoreZero;
    if (rhs.kind == ExprKind::BoolLit && rhs.value == 0) return OpKind::SstoreZero;
    return OpKind::SstoreNonzero;
}

void runStmts(const Block& b, const NodePath& bp, size_t i, PState st,
              std::vector<PState>& sink, EnumCtx& ctx);

void enterBlock(const Block& b, const NodePath& bp, PState st, std::vector<PState>& out,
                EnumCtx& ctx) {
    st.scopes.emplace_back();
    std::vector<PState> done;
    runStmts(b, bp, 0, std::move(st), done, ctx);
    for (PState& d : done) {
        d.scopes.pop_back();
        out.push_back(std::move(d));
    }
}

void runStmts(const Block& b, const NodePath& bp, size_t i, PState st,
              std::vector<PState>& sink, EnumCtx& ctx) {
    for (; i < b.stmts.size() && !st.terminated; ++i) {
        const Stmt& s = b.stmts[i];
        NodePath sp = bp;
        sp.push_back(static_cast<uint32_t>(i));
        auto blockPath = [&](uint32_t k) {
            NodePath p = sp;
            p.push_back(static_cast<uint32_t>(s.exprs.size()) + k);
            return p;
        };
        switch (s.kind) {
            case StmtKind::VarDecl: {
                st.steps.push_back({OpKind::VarDeclStmt, st.mult, st.decls, false});
                st.decls[{}] += 1;
                exprSteps(s.exprs[0], st);
                st.scopes.back().push_back(s.name);
                st.sig.push_back({sp, trimmedStmt(s)});
                break;
            }
            case StmtKind::Assign: {
                exprSteps(s.exprs[1], st);
                const Expr& lv = s.exprs[0];
                if (lv.kind == ExprKind::Var) {
                    st.push(st.isLocal(lv.name) ? OpKind::AssignLocal : storeKind(s.exprs[1]));
                } else {
                    exprSteps(lv.kids[0], st);
                    st.push(OpKind::MappingStoreExtra);
                    st.push(storeKind(s.exprs[1]));
                }
                st.sig.push_back({sp, trimmedStmt(s)});
                break;
            }
            case StmtKind::Require: {
                exprSteps(s.exprs[0], st);
                st.push(OpKind::RequireStmt);
                st.sig.push_back({sp, trimmedStmt(s)});
                auto truth = literalTruth(s.exprs[0]);
                if (truth && !*truth) return; // never completes; prune
                break;
            }
            case StmtKind::Return: {
                if (!s.exprs.empty()) exprSteps(s.exprs[0], st);
                st.push(OpKind::ReturnStmt);
                st.sig.push_back({sp, trimmedStmt(s)});
                st.terminated = true;
                break;
            }
            case StmtKind::ExprStmt: {
                exprSteps(s.exprs[0], st);
                st.push(OpKind::ExprStmtDrop);
                st.sig.push_back({sp, trimmedStmt(s)});
                break;
            }
            case StmtKind::If: {
                std::string condText = printExpr(s.exprs[0]);
                auto truth = literalTruth(s.exprs[0]);
                bool hasElse = s.blocks.size() > 1;
                for (int branch = 0; branch < 2; ++branch) {
                    bool taking = branch == 0;
                    if (truth && *truth != taking) continue;
                    if (!taking && !hasElse) {
                        // Empty else: charge and fall through directly.
                        PState next = st;
                        exprSteps(s.exprs[0], next);
                        next.push(OpKind::BranchIf);
                        next.sig.push_back({sp, "if(" + condText + ")->skip"});
                        runStmts(b, bp, i + 1, std::move(next), sink, ctx);
                        continue;
                    }
                    PState next = st;
                    exprSteps(s.exprs[0], next);
                    next.push(OpKind::BranchIf);
                    next.sig.push_back(
                        {sp, "if(" + condText + ")->" + (taking ? "then" : "else")});
                    std::vector<PState> after;
                    enterBlock(s.blocks[taking ? 0 : 1], blockPath(taking ? 0 : 1),
                               std::move(next), after, ctx);
                    for (PState& a : after) {
                        ctx.countPush();
                        runStmts(b, bp, i + 1, std::move(a), sink, ctx);
                    }
                }
                return;
            }
            case StmtKind::While: {
                std::string condText = printExpr(s.exprs[0]);
                auto truth = literalTruth(s.exprs[0]);
                if (truth && !*truth) {
                    // Statically skipped: entry, one condition check, done.
                    st.push(OpKind::LoopEntry);
                    exprSteps(s.exprs[0], st);
                    st.push(OpKind::LoopBranch);
                    st.sig.push_back({sp, "while(" + condText + ")->skip"});
                    break;
                }
                const std::string& var = ctx.loopVar.at(sp);

                // Summarized variants: body resolutions that run to completion,
                // repeated a symbolic number of times.
                {
                    PState pre = st;
                    pre.push(OpKind::LoopEntry);
                    pre.sig.push_back({sp, "while(" + condText + ")->loop"});
                    pre.loopVars.push_back(var);
                    auto condMult = pre.mult;
                    condMult.emplace_back(var, true);
                    auto bodyMult = pre.mult;
                    bodyMult.emplace_back(var, false);

                    PState header = pre;
                    std::swap(header.mult, condMult);
                    exprSteps(s.exprs[0], header);
                    header.push(OpKind::LoopBranch);
                    std::swap(header.mult, condMult); // restore body-entry mult

                    PState bodySt = header;
                    bodySt.mult = bodyMult;
                    CountExpr entryDecls = bodySt.decls;
                    size_t bodyStart = bodySt.steps.size();
                    std::vector<PState> bodyOut;
                    enterBlock(s.blocks[0], blockPath(0), std::move(bodySt), bodyOut, ctx);
                    for (PState& bo : bodyOut) {
                        if (bo.terminated) continue;
                        bo.push(OpKind::LoopIter);
                        // Per-iteration declarations: the count after the loop
                        // gains delta per trip, and the in-body snapshots vary.
                        CountExpr delta = bo.decls;
                        for (const auto& [mono, coeff] : entryDecls) {
                            delta[mono] -= coeff;
                            if (delta[mono] == 0) delta.erase(mono);
                        }
                        bo.decls = entryDecls;
                        for (const auto& [mono, coeff] : delta) {
                            std::vector<std::string> m = mono;
                            m.push_back(var);
                            std::sort(m.begin(), m.end());
                            bo.decls[m] += coeff;
                        }
                        if (!delta.empty())
                            for (size_t k = bodyStart; k < bo.steps.size(); ++k)
                                if (bo.steps[k].op == OpKind::VarDeclStmt)
                                    bo.steps[k].declVaries = true;
                        bo.mult = st.mult;
                        ctx.countPush();
                        runStmts(b, bp, i + 1, std::move(bo), sink, ctx);
                    }
                }

                // First-iteration-exit variants: body resolutions that return.
                {
                    PState once = st;
                    once.push(OpKind::LoopEntry);
                    once.sig.push_back({sp, "while(" + condText + ")->enter-return"});
                    exprSteps(s.exprs[0], once);
                    once.push(OpKind::LoopBranch);
                    std::vector<PState> bodyOut;
                    enterBlock(s.blocks[0], blockPath(0), std::move(once), bodyOut, ctx);
                    for (PState& bo : bodyOut) {
                        if (!bo.terminated) continue;
                        ctx.countPush();
                        runStmts(b, bp, i + 1, std::move(bo), sink, ctx);
                    }
                }
                return;
            }
        }
    }
    ctx.countPush();
    sink.push_back(std::move(st));
}

std::map<NodePath, std::string> assignLoopVars(const Contract& c) {
    std::map<NodePath, std::string> out;
    size_t ordinal = 0;
    Contract& mc = const_cast<Contract&>(c);
    walk(mc, [&](NodeRef n, const NodePath& p) {
        if (!std::holds_alternative<Stmt*>(n)) return;
        if (std::get<Stmt*>(n)->kind != StmtKind::While) return;
        out[p] = "n" + std::to_string(++ordinal);
    });
    return out;
}

std::string countText(const CountExpr& c) {
    std::string out;
    for (const auto& [mono, coeff] : c) {
        if (coeff == 0) continue;
        if (!out.empty()) out += "+";
        out += std::to_string(coeff);
        for (const std::string& v : mono) out += "*" + v;
    }
    return out.empty() ? "0" : out;
}

// All monomials a step's multiplicity expands to: a product of loop variables
// where each flagged factor also contributes a variant without it.
std::vector<std::vector<std::string>> expandMult(
    const std::vector<std::pair<std::string, bool>>& mult) {
    std::vector<std::vector<std::string>> monos{{}};
    for (const auto& [var, plusOne] : mult) {
        std::vector<std::vector<std::string>> next;
        for (const auto& m : monos) {
            std::vector<std::string> withVar = m;
            withVar.push_back(var);
            next.push_back(std::move(withVar));
            if (plusOne) next.push_back(m);
        }
        monos = std::move(next);
    }
    return monos;
}

} // namespace

PathSet enumeratePaths(const Contract& c, size_t cap) {
    CheckResult check = typecheck(c);
    if (!check.ok())
        throw std::invalid_argument("path enumeration requires a well-typed contract");
    EnumCtx ctx;
    ctx.loopVar = assignLoopVars(c);
    ctx.cap = cap;
    PathSet set;
    for (size_t fi = 0; fi < c.functions.size(); ++fi) {
        const Function& fn = c.functions[fi];
        PState init;
        init.scopes.emplace_back();
        for (const Param& p : fn.params) init.scopes.back().push_back(p.name);
        init.push(OpKind::CallBase);
        NodePath bodyPath{static_cast<uint32_t>(c.stateVars.size() + fi), 0};
        std::vector<PState> done;
        runStmts(fn.body, bodyPath, 0, std::move(init), done, ctx);
        for (PState& d : done) {
            set.paths.push_back(
                {fn.name, std::move(d.steps), std::move(d.sig), std::move(d.loopVars)});
            if (set.paths.size() > cap) throw PathExplosion(cap);
        }
    }
    return set;
}

GasFormula pathGasFormula(const GasPath& p, const CostTable& tbl) {
    GasFormula f;
    for (const AbsStep& step : p.steps) {
        auto monos = expandMult(step.mult);
        uint64_t cost;
        if (step.op != OpKind::VarDeclStmt) {
            cost = instructionGas(tbl, step.op);
        } else {
            bool staticCount = !step.declVaries &&
                               std::all_of(step.declCount.begin(), step.declCount.end(),
                                           [](const auto& e) { return e.first.empty(); });
            if (staticCount) {
                uint64_t before = 0;
                auto it = step.declCount.find({});
                if (it != step.declCount.end() && it->second > 0)
                    before = static_cast<uint64_t>(it->second);
                cost = instructionGas(tbl, step.op, before);
            } else if (tbl.memQuadNum == 0) {
                // Linear memory: the marginal cost is the slope wherever we are.
                cost = instructionGas(tbl, step.op, 0);
            } else {
                uint64_t base = instructionGas(tbl, step.op, 0) - tbl.memMarginal(0);
                std::string atom =
                    "mem(" + countText(step.declCount) + (step.declVaries ? "|iter" : "") + ")";
                for (const auto& m : monos) {
                    f.add(Rat(base), m);
                    f.add(Rat(1), m, atom);
                }
                continue;
            }
        }
        for (const auto& m : monos) f.add(Rat(static_cast<int64_t>(cost)), m);
    }
    return f;
}

GasFormula expectedGasFormula(const Contract& c, const CostTable& tbl,
                              const std::vector<Rat>& weights, size_t cap) {
    PathSet set = enumeratePaths(c, cap);
    if (!weights.empty() && weights.size() != set.paths.size())
        throw std::invalid_argument("expected " + std::to_string(set.paths.size()) +
                                    " path weights, got " + std::to_string(weights.size()));
    GasFormula sum;
    if (set.paths.empty()) return sum;
    Rat uniform(1, static_cast<int64_t>(set.paths.size()));
    for (size_t i = 0; i < set.paths.size(); ++i) {
        const Rat& w = weights.empty() ? uniform : weights[i];
        sum += scale(pathGasFormula(set.paths[i], tbl), w);
    }
    return sum;
}

LifespanResult lifespanGas(const Contract& c, const std::vector<TransactionRecord>& log,
                           const CostTable& tbl, uint64_t gasLimit) {
    LifespanResult out;
    for (const TransactionRecord& rec : log) {
        LifespanEntry entry;
        try {
            WorldState world = worldFromSlice(rec.preState);
            ExecutionEnv env;
            env.caller = rec.call.caller;
            env.callValue = rec.call.value;
            env.function = rec.call.function;
            env.args = rec.call.args;
            env.gasLimit = gasLimit;
            ExecutionResult res = execute(c, world, env, tbl);
            entry.status = res.status;
            entry.gasUsed = res.gasUsed;
            entry.replayed = true;
            if (res.status != rec.status)
                entry.note = std::string("status diverged: recorded ") + statusName(rec.status) +
                             ", replayed " + statusName(res.status);
        } catch (const VmSetupError& ex) {
            entry.replayed = false;
            entry.note = ex.what();
        }
        out.totalGas += entry.gasUsed;
        out.perTx.push_back(std::move(entry));
    }
    return out;
}

namespace {

// Minimal positions at which the two trees disagree (label changed, or the
// node exists on one side only).
std::vector<NodePath> changedPositions(const Contract& a, const Contract& b) {
    std::map<NodePath, std::string> la, lb;
    Contract& ma = const_cast<Contract&>(a);
    Contract& mb = const_cast<Contract&>(b);
    walk(ma, [&](NodeRef n, const NodePath& p) { la[p] = nodeLabel(n); });
    walk(mb, [&](NodeRef n, const NodePath& p) { lb[p] = nodeLabel(n); });
    std::vector<NodePath> raw;
    for (const auto& [p, l] : la) {
        auto it = lb.find(p);
        if (it == lb.end() || it->second != l) raw.push_back(p);
    }
    for (const auto& [p, l] : lb)
        if (!la.count(p)) raw.push_back(p);
    std::sort(raw.begin(), raw.end(), [](const NodePath& x, const NodePath& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    std::vector<NodePath> minimal;
    for (const NodePath& p : raw) {
        bool covered = std::any_of(minimal.begin(), minimal.end(),
                                   [&](const NodePath& q) { return isPrefix(q, p); });
        if (!covered) minimal.push_back(p);
    }
    return minimal;
}

bool touchesAny(const NodePath& at, const std::vector<NodePath>& marks) {
    return std::any_of(marks.begin(), marks.end(), [&](const NodePath& m) {
        return isPrefix(m, at) || isPrefix(at, m);
    });
}

std::string joinSig(const GasPath& p, const std::vector<NodePath>* mask) {
    std::string out = p.function;
    for (const SigStep& s : p.sig) {
        out += '\x1f';
        out += (mask && touchesAny(s.at, *mask)) ? "#" : s.text;
    }
    return out;
}

} // namespace

PathPartition classifyPaths(const PathSet& oldPaths, const PathSet& newPaths,
                            const Contract& cOld, const Contract& cNew) {
    std::vector<NodePath> marks = changedPositions(cOld, cNew);
    PathPartition part;
    std::vector<bool> oldUsed(oldPaths.paths.size(), false);
    std::vector<bool> newUsed(newPaths.paths.size(), false);

    auto matchRound = [&](const std::vector<NodePath>* mask, bool asJoint) {
        std::map<std::string, std::vector<size_t>> bySig;
        for (size_t i = 0; i < oldPaths.paths.size(); ++i)
            if (!oldUsed[i]) bySig[joinSig(oldPaths.paths[i], mask)].push_back(i);
        for (size_t j = 0; j < newPaths.paths.size(); ++j) {
            if (newUsed[j]) continue;
            auto it = bySig.find(joinSig(newPaths.paths[j], mask));
            if (it == bySig.end() || it->second.empty()) continue;
            size_t i = it->second.front();
            it->second.erase(it->second.begin());
            oldUsed[i] = newUsed[j] = true;
            (asJoint ? part.joint : part.repaired).emplace_back(i, j);
        }
    };
    matchRound(nullptr, true);
    matchRound(&marks, false);

    for (size_t i = 0; i < oldPaths.paths.size(); ++i)
        if (!oldUsed[i]) part.removed.push_back(i);
    for (size_t j = 0; j < newPaths.paths.size(); ++j)
        if (!newUsed[j]) part.fresh.push_back(j);
    return part;
}

PathPartition classifyPaths(const Contract& cOld, const Contract& cNew, size_t cap) {
    return classifyPaths(enumeratePaths(cOld, cap), enumeratePaths(cNew, cap), cOld, cNew);
}

ReducedComparison reducedCompare(const Contract& cOld, const Contract& cNew,
                                 const CostTable& tbl, size_t cap) {
    PathSet oldSet = enumeratePaths(cOld, cap);
    PathSet newSet = enumeratePaths(cNew, cap);
    ReducedComparison out;
    out.partition = classifyPaths(oldSet, newSet, cOld, cNew);

    std::vector<GasFormula> oldF(oldSet.paths.size());
    for (size_t i = 0; i < oldSet.paths.size(); ++i)
        oldF[i] = pathGasFormula(oldSet.paths[i], tbl);

    std::vector<GasFormula> newF(newSet.paths.size());
    std::vector<bool> newDone(newSet.paths.size(), false);
    for (const auto& [i, j] : out.partition.joint) {
        // Identical content implies an identical formula as long as the trip
        // variables kept their names.
        if (oldSet.paths[i].loopVars == newSet.paths[j].loopVars) {
            newF[j] = oldF[i];
            newDone[j] = true;
            ++out.reusedFormulas;
        }
    }
    for (size_t j = 0; j < newSet.paths.size(); ++j)
        if (!newDone[j]) newF[j] = pathGasFormula(newSet.paths[j], tbl);

    std::vector<bool> oldJoint(oldSet.paths.size(), false);
    std::vector<bool> newJoint(newSet.paths.size(), false);
    for (const auto& [i, j] : out.partition.joint) {
        oldJoint[i] = true;
        newJoint[j] = true;
    }

    if (!oldSet.paths.empty()) {
        Rat w(1, static_cast<int64_t>(oldSet.paths.size()));
        for (size_t i = 0; i < oldSet.paths.size(); ++i) {
            GasFormula scaled = scale(oldF[i], w);
            out.fullOld += scaled;
            if (!oldJoint[i]) out.diffOld += scaled;
        }
    }
    if (!newSet.paths.empty()) {
        Rat w(1, static_cast<int64_t>(newSet.paths.size()));
        for (size_t j = 0; j < newSet.paths.size(); ++j) {
            GasFormula scaled = scale(newF[j], w);
            out.fullNew += scaled;
            if (!newJoint[j]) out.diffNew += scaled;
        }
    }
    out.verdict = compareDominance(out.fullOld, out.fullNew);
    return out;
}

} // namespace gasrepair
