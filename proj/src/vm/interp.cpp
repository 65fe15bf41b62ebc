#include "gasrepair/vm/interp.hpp"

#include <sstream>

namespace gasrepair {

const char* statusName(Status s) {
    switch (s) {
        case Status::Success: return "success";
        case Status::RequireFailed: return "requireFailed";
        case Status::OutOfGas: return "outOfGas";
    }
    return "?";
}

std::optional<Status> statusFromName(const std::string& s) {
    if (s == "success") return Status::Success;
    if (s == "requireFailed") return Status::RequireFailed;
    if (s == "outOfGas") return Status::OutOfGas;
    return std::nullopt;
}

std::string addrToString(const U256& a) {
    std::ostringstream os;
    os << "0x" << std::hex << a;
    return os.str();
}

std::string slotKey(const std::string& varName) { return varName; }

std::string slotKey(const std::string& mappingName, const U256& key) {
    return mappingName + "[" + addrToString(key) + "]";
}

WorldState deployState(const Contract& c, const U256& contractAddress) {
    WorldState w;
    Account& acct = w.accounts[contractAddress];
    for (const StateVar& v : c.stateVars) {
        if (!v.init) continue;
        if (v.init->value != 0) acct.storage[slotKey(v.name)] = v.init->value;
    }
    return w;
}

WorldState worldFromSlice(const StateSlice& slice) {
    WorldState w;
    for (const auto& [addr, s] : slice.accounts) {
        Account& acct = w.accounts[addr];
        acct.balance = s.balance;
        for (const auto& [k, v] : s.storage)
            if (v != 0) acct.storage[k] = v;
    }
    return w;
}

namespace {

constexpr int kDepthCap = 4;
const U256 kAddressMask = (U256(1) << 160) - 1;

struct RequireSignal {};
struct OogSignal {};
struct ReturnSignal {
    std::optional<U256> value;
};

class Interp {
public:
    Interp(const Contract& c, WorldState world, const ExecutionEnv& env, const CostTable& costs)
        : c_(c), env_(env), costs_(costs), world_(std::move(world)) {
        for (const StateVar& v : c.stateVars) stateTypes_[v.name] = v.type;
    }

    ExecutionResult run() {
        ExecutionResult result;
        WorldState snapshot = world_;
        try {
            result.returnValue = callFunction(env_.function, env_.caller, env_.callValue,
                                              env_.args, /*topLevel=*/true);
            result.status = Status::Success;
        } catch (const RequireSignal&) {
            world_ = std::move(snapshot);
            result.status = Status::RequireFailed;
        } catch (const OogSignal&) {
            world_ = std::move(snapshot);
            result.status = Status::OutOfGas;
        }
        result.post = std::move(world_);
        result.gasUsed = gas_;
        result.flags = std::move(flags_);
        result.trace = std::move(trace_);
        result.touchedBalances = std::move(touchedBalances_);
        result.touchedSlots = std::move(touchedSlots_);
        return result;
    }

private:
    const Contract& c_;
    const ExecutionEnv& env_;
    const CostTable& costs_;
    WorldState world_;
    std::map<std::string, Type> stateTypes_;

    uint64_t gas_ = 0;
    uint64_t declCount_ = 0;
    int depth_ = 0;
    std::vector<TraceStep> trace_;
    ExecFlags flags_;
    std::set<U256> touchedBalances_;
    std::set<std::string> touchedSlots_;

    // Current call frame.
    std::vector<std::map<std::string, U256>> scopes_;
    U256 caller_ = 0;
    U256 callValue_ = 0;
    NodePath fnPath_;

    void charge(OpKind op, const NodePath& node, uint64_t aux = 0) {
        uint64_t memBefore = op == OpKind::VarDeclStmt ? declCount_ : 0;
        gas_ += instructionGas(costs_, op, memBefore);
        TraceStep step;
        step.node = node;
        step.op = op;
        step.aux = op == OpKind::VarDeclStmt ? memBefore : aux;
        trace_.push_back(std::move(step));
        if (gas_ > env_.gasLimit) throw OogSignal{};
    }

    const Function* findFunction(const std::string& name, uint32_t* indexOut) const {
        for (size_t i = 0; i < c_.functions.size(); ++i) {
            if (c_.functions[i].name == name) {
                *indexOut = static_cast<uint32_t>(c_.stateVars.size() + i);
                return &c_.functions[i];
            }
        }
        return nullptr;
    }

    std::optional<U256> callFunction(const std::string& name, const U256& caller,
                                     const U256& value, const std::vector<U256>& args,
                                     bool topLevel) {
        uint32_t fnIndex = 0;
        const Function* fn = findFunction(name, &fnIndex);
        if (!fn) throw VmSetupError("unknown function '" + name + "'");
        if (args.size() != fn->params.size())
            throw VmSetupError("function '" + name + "' takes " +
                               std::to_string(fn->params.size()) + " arguments");
        for (size_t i = 0; i < args.size(); ++i) {
            if (fn->params[i].type == Type::Bool && args[i] > 1)
                throw VmSetupError("argument " + std::to_string(i) + " must be 0 or 1");
            if (fn->params[i].type == Type::Address && (args[i] & ~kAddressMask) != 0)
                throw VmSetupError("argument " + std::to_string(i) + " exceeds 160 bits");
        }

        NodePath fnPath{fnIndex};
        if (topLevel) charge(OpKind::CallBase, fnPath);
        if (value > 0) {
            if (!fn->payable) throw RequireSignal{};
            touchedBalances_.insert(caller);
            touchedBalances_.insert(env_.contractAddress);
            Account& from = world_.accounts[caller];
            if (from.balance < value) throw RequireSignal{};
            from.balance -= value;
            world_.accounts[env_.contractAddress].balance += value;
        }

        // Save the frame of the interrupted call when re-entering.
        auto savedScopes = std::move(scopes_);
        U256 savedCaller = caller_;
        U256 savedValue = callValue_;
        NodePath savedFnPath = fnPath_;
        scopes_.clear();
        scopes_.emplace_back();
        caller_ = caller;
        callValue_ = value;
        fnPath_ = fnPath;
        for (size_t i = 0; i < args.size(); ++i) scopes_.back()[fn->params[i].name] = args[i];

        std::optional<U256> ret;
        NodePath bodyPath = fnPath;
        bodyPath.push_back(0);
        try {
            execBlock(fn->body, bodyPath);
            if (fn->returnType) ret = U256(0); // fell off the end of a typed function
        } catch (const ReturnSignal& r) {
            ret = r.value;
            if (fn->returnType && !ret) ret = U256(0);
        } catch (...) {
            scopes_ = std::move(savedScopes);
            caller_ = savedCaller;
            callValue_ = savedValue;
            fnPath_ = savedFnPath;
            throw;
        }
        scopes_ = std::move(savedScopes);
        caller_ = savedCaller;
        callValue_ = savedValue;
        fnPath_ = savedFnPath;
        return ret;
    }

    void execBlock(const Block& b, const NodePath& blockPath) {
        scopes_.emplace_back();
        for (size_t i = 0; i < b.stmts.size(); ++i) {
            NodePath sp = blockPath;
            sp.push_back(static_cast<uint32_t>(i));
            try {
                execStmt(b.stmts[i], sp);
            } catch (...) {
                scopes_.pop_back();
                throw;
            }
        }
        scopes_.pop_back();
    }

    void execStmt(const Stmt& s, const NodePath& sp) {
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
                charge(OpKind::VarDeclStmt, sp);
                ++declCount_;
                U256 v = eval(s.exprs[0], exprPath(0));
                scopes_.back()[s.name] = v;
                break;
            }
            case StmtKind::Assign: {
                U256 v = eval(s.exprs[1], exprPath(1));
                store(s.exprs[0], exprPath(0), v, sp);
                break;
            }
            case StmtKind::If: {
                U256 cond = eval(s.exprs[0], exprPath(0));
                charge(OpKind::BranchIf, sp, cond != 0 ? 1 : 0);
                if (cond != 0)
                    execBlock(s.blocks[0], blockPath(0));
                else if (s.blocks.size() > 1)
                    execBlock(s.blocks[1], blockPath(1));
                break;
            }
            case StmtKind::While: {
                charge(OpKind::LoopEntry, sp);
                uint64_t iter = 0;
                while (true) {
                    U256 cond = eval(s.exprs[0], exprPath(0));
                    charge(OpKind::LoopBranch, sp, iter);
                    if (cond == 0) break;
                    execBlock(s.blocks[0], blockPath(0));
                    charge(OpKind::LoopIter, sp, iter);
                    ++iter;
                }
                break;
            }
            case StmtKind::Require: {
                U256 cond = eval(s.exprs[0], exprPath(0));
                charge(OpKind::RequireStmt, sp);
                if (cond == 0) throw RequireSignal{};
                break;
            }
            case StmtKind::Return: {
                std::optional<U256> v;
                if (!s.exprs.empty()) v = eval(s.exprs[0], exprPath(0));
                charge(OpKind::ReturnStmt, sp);
                throw ReturnSignal{v};
            }
            case StmtKind::ExprStmt: {
                eval(s.exprs[0], exprPath(0), /*discarded=*/true);
                charge(OpKind::ExprStmtDrop, sp);
                break;
            }
        }
    }

    U256* findLocal(const std::string& name) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    U256 readStorage(const std::string& key) {
        touchedSlots_.insert(key);
        Account& acct = world_.accounts[env_.contractAddress];
        auto it = acct.storage.find(key);
        return it == acct.storage.end() ? U256(0) : it->second;
    }

    void writeStorage(const std::string& key, const U256& v) {
        touchedSlots_.insert(key);
        Account& acct = world_.accounts[env_.contractAddress];
        if (v == 0)
            acct.storage.erase(key);
        else
            acct.storage[key] = v;
    }

    void store(const Expr& lvalue, const NodePath& lvPath, const U256& v, const NodePath& sp) {
        if (lvalue.kind == ExprKind::Var) {
            if (U256* slot = findLocal(lvalue.name)) {
                charge(OpKind::AssignLocal, sp);
                *slot = v;
                return;
            }
            charge(v == 0 ? OpKind::SstoreZero : OpKind::SstoreNonzero, sp);
            writeStorage(slotKey(lvalue.name), v);
            return;
        }
        // Mapping element: evaluate the key, then pay hash + store.
        NodePath keyPath = lvPath;
        keyPath.push_back(0);
        U256 key = eval(lvalue.kids[0], keyPath);
        charge(OpKind::MappingStoreExtra, sp);
        charge(v == 0 ? OpKind::SstoreZero : OpKind::SstoreNonzero, sp);
        writeStorage(slotKey(lvalue.name, key), v);
    }

    U256 eval(const Expr& e, const NodePath& p, bool discarded = false) {
        auto kidPath = [&p](uint32_t i) {
            NodePath q = p;
            q.push_back(i);
            return q;
        };
        switch (e.kind) {
            case ExprKind::IntLit:
            case ExprKind::BoolLit:
            case ExprKind::AddressLit:
                charge(OpKind::Literal, p);
                return e.value;
            case ExprKind::Var: {
                if (U256* slot = findLocal(e.name)) {
                    charge(OpKind::LocalRead, p);
                    return *slot;
                }
                charge(OpKind::StateRead, p);
                return readStorage(slotKey(e.name));
            }
            case ExprKind::MappingIndex: {
                charge(OpKind::MappingRead, p);
                U256 key = eval(e.kids[0], kidPath(0));
                return readStorage(slotKey(e.name, key));
            }
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
                charge(op, p);
                U256 a = eval(e.kids[0], kidPath(0));
                U256 b = eval(e.kids[1], kidPath(1));
                switch (e.op) {
                    case BinOp::Add: {
                        U256 r = a + b;
                        if (r < a) flags_.overflowWrapped.push_back(p);
                        return r;
                    }
                    case BinOp::Sub: {
                        if (b > a) flags_.overflowWrapped.push_back(p);
                        return a - b;
                    }
                    case BinOp::Mul: {
                        U256 r = a * b;
                        if (a != 0 && r / a != b) flags_.overflowWrapped.push_back(p);
                        return r;
                    }
                    case BinOp::Div: return b == 0 ? U256(0) : a / b;
                    case BinOp::Lt: return a < b ? 1 : 0;
                    case BinOp::Le: return a <= b ? 1 : 0;
                    case BinOp::Gt: return a > b ? 1 : 0;
                    case BinOp::Ge: return a >= b ? 1 : 0;
                    case BinOp::Eq: return a == b ? 1 : 0;
                    case BinOp::Ne: return a != b ? 1 : 0;
                    case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
                    case BinOp::Or: return (a != 0 || b != 0) ? 1 : 0;
                }
                return 0;
            }
            case ExprKind::Not: {
                charge(OpKind::NotOp, p);
                return eval(e.kids[0], kidPath(0)) == 0 ? 1 : 0;
            }
            case ExprKind::MsgSender:
                charge(OpKind::EnvRead, p);
                return caller_;
            case ExprKind::MsgValue:
                charge(OpKind::EnvRead, p);
                return callValue_;
            case ExprKind::BalanceOf: {
                charge(OpKind::BalanceRead, p);
                U256 a = eval(e.kids[0], kidPath(0));
                touchedBalances_.insert(a);
                return world_.balanceOf(a);
            }
            case ExprKind::Send: return evalSend(e, p, discarded);
        }
        return 0;
    }

    U256 evalSend(const Expr& e, const NodePath& p, bool discarded) {
        charge(OpKind::SendCall, p);
        NodePath tp = p, ap = p;
        tp.push_back(0);
        ap.push_back(1);
        U256 target = eval(e.kids[0], tp);
        U256 amount = eval(e.kids[1], ap);
        touchedBalances_.insert(env_.contractAddress);
        touchedBalances_.insert(target);

        Account& self = world_.accounts[env_.contractAddress];
        bool reentrant = env_.adversary && target == env_.adversary->address;
        bool ok = self.balance >= amount && !(reentrant && depth_ + 1 >= kDepthCap);
        if (!ok) {
            if (discarded) flags_.uncheckedSendFailed.push_back(p);
            return 0;
        }
        self.balance -= amount;
        world_.accounts[target].balance += amount;
        if (reentrant) {
            WorldState snapshot = world_;
            ++depth_;
            try {
                callFunction(env_.adversary->reenterFunction, env_.adversary->address, 0,
                             env_.adversary->args, /*topLevel=*/false);
            } catch (const RequireSignal&) {
                world_ = std::move(snapshot); // inner call reverts alone
            } catch (...) {
                --depth_;
                throw;
            }
            --depth_;
        }
        return 1;
    }
};

} // namespace

ExecutionResult execute(const Contract& c, const WorldState& world, const ExecutionEnv& env,
                        const CostTable& costs) {
    return Interp(c, world, env, costs).run();
}

TestResult runTest(const Contract& c, const TestCase& t, const CostTable& costs,
                   uint64_t gasLimit) {
    TestResult out;
    ExecutionEnv env;
    env.caller = t.call.caller;
    env.callValue = t.call.value;
    env.function = t.call.function;
    env.args = t.call.args;
    env.gasLimit = gasLimit;
    ExecutionResult r;
    try {
        r = execute(c, worldFromSlice(t.preState), env, costs);
    } catch (const VmSetupError& e) {
        out.mismatch = std::string("setup: ") + e.what();
        return out;
    }
    out.gasUsed = r.gasUsed;
    if (r.status != t.status) {
        out.mismatch = std::string("status mismatch: expected ") + statusName(t.status) +
                       ", got " + statusName(r.status);
        return out;
    }
    for (const auto& [addr, slice] : t.postState.accounts) {
        U256 actual = r.post.balanceOf(addr);
        if (actual != slice.balance) {
            std::ostringstream os;
            os << "balance mismatch at " << addrToString(addr) << ": expected " << slice.balance
               << ", got " << actual;
            out.mismatch = os.str();
            return out;
        }
        auto acct = r.post.accounts.find(addr);
        for (const auto& [key, expected] : slice.storage) {
            U256 got = 0;
            if (acct != r.post.accounts.end()) {
                auto it = acct->second.storage.find(key);
                if (it != acct->second.storage.end()) got = it->second;
            }
            if (got != expected) {
                std::ostringstream os;
                os << "storage mismatch at " << key << ": expected " << expected << ", got "
                   << got;
                out.mismatch = os.str();
                return out;
            }
        }
    }
    if (t.returnValue.has_value() != r.returnValue.has_value() ||
        (t.returnValue && *t.returnValue != *r.returnValue)) {
        out.mismatch = "return value mismatch";
        return out;
    }
    out.pass = true;
    return out;
}

} // namespace gasrepair
