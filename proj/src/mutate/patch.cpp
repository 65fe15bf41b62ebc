#include "gasrepair/mutate/patch.hpp"

#include "gasrepair/lang/parser.hpp"
#include "gasrepair/lang/printer.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <sstream>

namespace gasrepair {

const char* editKindName(EditKind k) {
    switch (k) {
        case EditKind::Move: return "move";
        case EditKind::Insert: return "insert";
        case EditKind::Replace: return "replace";
    }
    return "?";
}

std::optional<EditKind> editKindFromName(const std::string& s) {
    if (s == "move") return EditKind::Move;
    if (s == "insert") return EditKind::Insert;
    if (s == "replace") return EditKind::Replace;
    return std::nullopt;
}

std::set<EditKind> Patch::kinds() const {
    std::set<EditKind> out;
    for (const EditOp& e : edits) out.insert(e.kind);
    return out;
}

namespace {

Block* resolveBlock(Contract& c, const NodePath& p) {
    auto r = resolve(c, p);
    if (!r || !std::holds_alternative<Block*>(*r)) return nullptr;
    return std::get<Block*>(*r);
}

bool applyMove(Contract& c, const EditOp& e) {
    if (e.src.empty() || e.dst.empty()) return false;
    auto srcRef = resolve(c, e.src);
    if (!srcRef || !std::holds_alternative<Stmt*>(*srcRef)) return false;
    NodePath srcParent(e.src.begin(), e.src.end() - 1);
    uint32_t srcIdx = e.src.back();
    Block* from = resolveBlock(c, srcParent);
    if (!from || srcIdx >= from->stmts.size()) return false;

    NodePath dstBlockPath(e.dst.begin(), e.dst.end() - 1);
    uint32_t dstIdx = e.dst.back();
    if (isPrefix(e.src, dstBlockPath)) return false; // cannot move into itself
    Block* probe = resolveBlock(c, dstBlockPath);
    if (!probe || dstIdx > probe->stmts.size()) return false;

    Stmt moved = std::move(from->stmts[srcIdx]);
    from->stmts.erase(from->stmts.begin() + srcIdx);

    // Indices to the right of the removal shift down by one.
    if (dstBlockPath == srcParent) {
        if (dstIdx > srcIdx) --dstIdx;
    } else if (srcParent.size() < dstBlockPath.size() &&
               std::equal(srcParent.begin(), srcParent.end(), dstBlockPath.begin()) &&
               dstBlockPath[srcParent.size()] > srcIdx) {
        --dstBlockPath[srcParent.size()];
    }
    Block* to = resolveBlock(c, dstBlockPath);
    if (!to || dstIdx > to->stmts.size()) return false;
    to->stmts.insert(to->stmts.begin() + dstIdx, std::move(moved));
    return true;
}

bool applyInsert(Contract& c, const EditOp& e) {
    if (!e.stmt || e.dst.empty()) return false;
    NodePath blockPath(e.dst.begin(), e.dst.end() - 1);
    uint32_t idx = e.dst.back();
    Block* b = resolveBlock(c, blockPath);
    if (!b || idx > b->stmts.size()) return false;
    b->stmts.insert(b->stmts.begin() + idx, *e.stmt);
    return true;
}

bool applyReplace(Contract& c, const EditOp& e) {
    auto ref = resolve(c, e.src);
    if (!ref) return false;
    if (std::holds_alternative<Expr*>(*ref)) {
        if (!e.expr) return false;
        *std::get<Expr*>(*ref) = *e.expr;
        return true;
    }
    if (std::holds_alternative<Stmt*>(*ref)) {
        if (!e.stmt) return false;
        *std::get<Stmt*>(*ref) = *e.stmt;
        return true;
    }
    return false;
}

} // namespace

bool applyEdit(Contract& c, const EditOp& e) {
    bool ok = false;
    switch (e.kind) {
        case EditKind::Move: ok = applyMove(c, e); break;
        case EditKind::Insert: ok = applyInsert(c, e); break;
        case EditKind::Replace: ok = applyReplace(c, e); break;
    }
    if (ok) ++c.generation;
    return ok;
}

std::optional<Contract> applyPatch(const Contract& base, const Patch& p) {
    if (p.baseHash != 0 && p.baseHash != contentHash(base)) return std::nullopt;
    Contract c = base;
    for (const EditOp& e : p.edits)
        if (!applyEdit(c, e)) return std::nullopt;
    return c;
}

size_t treeDiff(const Contract& a, const Contract& b) {
    std::map<NodePath, std::string> la, lb;
    walk(const_cast<Contract&>(a), [&](NodeRef n, const NodePath& p) { la[p] = nodeLabel(n); });
    walk(const_cast<Contract&>(b), [&](NodeRef n, const NodePath& p) { lb[p] = nodeLabel(n); });
    size_t count = 0;
    auto ia = la.begin();
    auto ib = lb.begin();
    while (ia != la.end() || ib != lb.end()) {
        if (ib == lb.end() || (ia != la.end() && ia->first < ib->first)) {
            ++count;
            ++ia;
        } else if (ia == la.end() || ib->first < ia->first) {
            ++count;
            ++ib;
        } else {
            if (ia->second != ib->second) ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

nlohmann::json patchToJson(const Patch& p) {
    std::ostringstream hex;
    hex << "0x" << std::hex << p.baseHash;
    nlohmann::json edits = nlohmann::json::array();
    for (const EditOp& e : p.edits) {
        nlohmann::json j;
        j["op"] = editKindName(e.kind);
        switch (e.kind) {
            case EditKind::Move:
                j["src"] = pathToString(e.src);
                j["dst"] = pathToString(e.dst);
                break;
            case EditKind::Insert:
                j["dst"] = pathToString(e.dst);
                j["stmt"] = printStmt(*e.stmt, 0);
                break;
            case EditKind::Replace:
                j["at"] = pathToString(e.src);
                if (e.expr) j["expr"] = printExpr(*e.expr);
                if (e.stmt) j["stmt"] = printStmt(*e.stmt, 0);
                break;
        }
        edits.push_back(std::move(j));
    }
    return nlohmann::json{{"base", hex.str()}, {"edits", std::move(edits)}};
}

std::optional<Patch> patchFromJson(const nlohmann::json& j, std::string* error) {
    auto fail = [&](const std::string& msg) -> std::optional<Patch> {
        if (error) *error = msg;
        return std::nullopt;
    };
    try {
        Patch p;
        if (!j.contains("base")) return fail("missing base hash");
        std::string h = j.at("base").get<std::string>();
        p.baseHash = std::stoull(h, nullptr, 16);
        for (const auto& je : j.at("edits")) {
            EditOp e;
            std::string opName = je.at("op").get<std::string>();
            auto kind = editKindFromName(opName);
            if (!kind) return fail("unknown edit op '" + opName + "'");
            e.kind = *kind;
            auto getPath = [&](const char* key) -> std::optional<NodePath> {
                return pathFromString(je.at(key).get<std::string>());
            };
            switch (e.kind) {
                case EditKind::Move: {
                    auto s = getPath("src");
                    auto d = getPath("dst");
                    if (!s || !d) return fail("bad path");
                    e.src = *s;
                    e.dst = *d;
                    break;
                }
                case EditKind::Insert: {
                    auto d = getPath("dst");
                    if (!d) return fail("bad path");
                    e.dst = *d;
                    e.stmt = parseStatement(je.at("stmt").get<std::string>());
                    break;
                }
                case EditKind::Replace: {
                    auto s = getPath("at");
                    if (!s) return fail("bad path");
                    e.src = *s;
                    if (je.contains("expr"))
                        e.expr = parseExpression(je.at("expr").get<std::string>());
                    else
                        e.stmt = parseStatement(je.at("stmt").get<std::string>());
                    break;
                }
            }
            p.edits.push_back(std::move(e));
        }
        return p;
    } catch (const std::exception& ex) {
        return fail(ex.what());
    }
}

} // namespace gasrepair
