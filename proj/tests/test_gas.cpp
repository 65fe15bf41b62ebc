#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gasrepair/gas/paths.hpp"
#include "gasrepair/lang/parser.hpp"
#include "gasrepair/lang/printer.hpp"
#include "gasrepair/lang/typecheck.hpp"
#include "gasrepair/mutate/sampler.hpp"
#include "gasrepair/vm/interp.hpp"

#include "support/gen.hpp"

#include <algorithm>

using namespace gasrepair;

namespace {

Contract mustParse(const std::string& src) {
    Contract c = parse(src);
    REQUIRE(typecheck(c).ok());
    return c;
}

uint64_t runGas(const Contract& c, const std::string& fn, std::vector<U256> args = {},
                U256 value = 0, const CostTable& tbl = CostTable::defaults()) {
    ExecutionEnv env;
    env.function = fn;
    env.args = std::move(args);
    env.callValue = value;
    env.caller = U256(0xabc);
    ExecutionResult res = execute(c, deployState(c), env, tbl);
    REQUIRE(res.status == Status::Success);
    return res.gasUsed;
}

GasFormula mono(int64_t coeff, std::vector<std::string> vars = {},
                std::optional<std::string> atom = std::nullopt) {
    GasFormula f;
    f.add(Rat(coeff), std::move(vars), std::move(atom));
    return f;
}

GasFormula linear(int64_t a, const std::string& var, int64_t b) {
    GasFormula f;
    f.add(Rat(a), {var});
    f.add(Rat(b));
    return f;
}

} // namespace

TEST_CASE("terms merge into canonical order") {
    GasFormula f;
    f.add(Rat(10), {"n1"});
    f.add(Rat(42));
    f.add(Rat(3), {"n2", "n1"});
    f.add(Rat(5), {"n1"});
    CHECK(formulaText(f) == "3*n1*n2 + 15*n1 + 42");
    f.add(Rat(-15), {"n1"});
    CHECK(formulaText(f) == "3*n1*n2 + 42");
    CHECK(f == f);
    GasFormula g;
    g.add(Rat(42));
    g.add(Rat(3), {"n1", "n2"});
    CHECK(f == g);
    CHECK_FALSE(f == mono(42));
    CHECK(GasFormula{}.isZero());
    CHECK(formulaText(GasFormula{}) == "0");
    CHECK(mono(7).isConstant());
    CHECK(mono(7).constantValue() == Rat(7));
    CHECK_FALSE(linear(2, "n1", 1).isConstant());
    CHECK_THROWS_AS(linear(2, "n1", 1).constantValue(), std::logic_error);
    GasFormula half;
    half.add(Rat(1, 2), {"n1"});
    CHECK(formulaText(half) == "1/2*n1");
}

TEST_CASE("evaluation multiplies out variables and atoms") {
    GasFormula f;
    f.add(Rat(3), {"n1", "n1"});
    f.add(Rat(2), {"n1"}, std::string("q"));
    f.add(Rat(5));
    std::map<std::string, Rat> bind{{"n1", Rat(4)}, {"q", Rat(10)}};
    CHECK(evaluate(f, bind) == Rat(3 * 16 + 2 * 4 * 10 + 5));
    CHECK_THROWS_AS(evaluate(f, {{"n1", Rat(1)}}), std::out_of_range);
    CHECK(evaluate(scale(f, Rat(1, 2)), bind) == Rat(3 * 16 + 2 * 4 * 10 + 5, 2));
    CHECK(evaluate(scaleByVar(mono(6), "n2"), {{"n2", Rat(7)}}) == Rat(42));
}

TEST_CASE("atoms substitute to stable fresh variables") {
    GasFormula a;
    a.add(Rat(1), {"x", "x"});
    a.add(Rat(1), {}, std::string("sin(x)"));
    GasFormula b;
    b.add(Rat(1), {"x", "x"});
    b.add(Rat(1), {}, std::string("cos(x)"));
    b.add(Rat(3), {}, std::string("sin(x)"));

    SubstitutionBinding bind;
    GasFormula pa = toPolynomial(a, bind);
    GasFormula pb = toPolynomial(b, bind);
    REQUIRE(bind.mapping().size() == 2);
    std::string ySin = bind.mapping().at("sin(x)");
    std::string zCos = bind.mapping().at("cos(x)");
    CHECK(ySin != zCos);

    GasFormula wantA;
    wantA.add(Rat(1), {"x", "x"});
    wantA.add(Rat(1), {ySin});
    CHECK(pa == wantA);
    GasFormula wantB;
    wantB.add(Rat(1), {"x", "x"});
    wantB.add(Rat(1), {zCos});
    wantB.add(Rat(3), {ySin});
    CHECK(pb == wantB);

    CHECK(toPolynomial(wantA, bind) == wantA);
}

TEST_CASE("dominance follows the aligned-coefficient rules") {
    GasFormula f = linear(10, "n1", 5);
    CHECK(compareDominance(f, f) == DominanceVerdict::NoDominance);
    CHECK(compareDominance(f, linear(10, "n1", 7)) == DominanceVerdict::AdominatesB);
    CHECK(compareDominance(linear(10, "n1", 7), f) == DominanceVerdict::BdominatesA);
    CHECK(compareDominance(linear(3, "n1", 1), linear(2, "n1", 9)) ==
          DominanceVerdict::NoDominance);
    CHECK(compareDominance(linear(5, "n1", 1), mono(9, {"n1"})) ==
          DominanceVerdict::NoDominance);
    CHECK(compareDominance(mono(1, {"n1"}), mono(1, {"n2"})) == DominanceVerdict::NoDominance);
    CHECK(compareDominance(mono(42), mono(43)) == DominanceVerdict::AdominatesB);
    GasFormula qa = mono(1, {}, std::string("mem(2|iter)"));
    GasFormula qb = mono(2, {}, std::string("mem(2|iter)"));
    CHECK(compareDominance(qa, qb) == DominanceVerdict::AdominatesB);
    CHECK(std::string(verdictName(DominanceVerdict::NoDominance)) == "NoDominance");
}

TEST_CASE("dominance is irreflexive, asymmetric, transitive, and grid-sound") {
    Rng rng(424242);
    std::vector<std::string> varPool{"n1", "n2", "n3"};
    auto randomShape = [&]() {
        std::vector<std::vector<std::string>> shape{{}};
        for (const auto& v : varPool)
            if (rng.below(2)) shape.push_back({v});
        if (rng.below(2)) shape.push_back({"n1", "n2"});
        return shape;
    };
    auto randomOver = [&](const std::vector<std::vector<std::string>>& shape) {
        GasFormula f;
        for (const auto& m : shape) f.add(Rat(static_cast<int64_t>(1 + rng.below(20))), m);
        return f;
    };
    std::vector<int64_t> gridVals{0, 1, 2, 7, 50, 100};
    auto gridSound = [&](const GasFormula& a, const GasFormula& b) {
        for (int64_t x : gridVals)
            for (int64_t y : gridVals) {
                std::map<std::string, Rat> bind{
                    {"n1", Rat(x)}, {"n2", Rat(y)}, {"n3", Rat((x + y) % 101)}};
                if (evaluate(a, bind) > evaluate(b, bind)) return false;
            }
        return true;
    };
    for (int iter = 0; iter < 300; ++iter) {
        auto shape = randomShape();
        GasFormula a = randomOver(shape);
        GasFormula b = rng.below(3) == 0 ? randomOver(randomShape()) : randomOver(shape);
        GasFormula c = randomOver(shape);

        CHECK(compareDominance(a, a) == DominanceVerdict::NoDominance);
        auto ab = compareDominance(a, b);
        auto ba = compareDominance(b, a);
        if (ab == DominanceVerdict::AdominatesB) {
            CHECK(ba == DominanceVerdict::BdominatesA);
            CHECK(gridSound(a, b));
        }
        if (ab == DominanceVerdict::BdominatesA) CHECK(ba == DominanceVerdict::AdominatesB);
        auto bc = compareDominance(b, c);
        if (ab == DominanceVerdict::AdominatesB && bc == DominanceVerdict::AdominatesB)
            CHECK(compareDominance(a, c) == DominanceVerdict::AdominatesB);
    }
}

TEST_CASE("dominance levels peel non-dominated fronts") {
    std::vector<GasFormula> same{mono(5), mono(5), mono(5)};
    CHECK(dominanceLevels(same) == std::vector<size_t>{1, 1, 1});

    std::vector<GasFormula> chain{mono(6, {"n1"}), mono(5, {"n1"}), mono(7, {"n1"})};
    CHECK(dominanceLevels(chain) == std::vector<size_t>{2, 1, 3});

    // 9n has a different term count than 5n+1, so neither side dominates.
    std::vector<GasFormula> mixed{linear(5, "n1", 1), linear(5, "n1", 1), mono(9, {"n1"})};
    CHECK(dominanceLevels(mixed) == std::vector<size_t>{1, 1, 1});

    std::vector<GasFormula> aligned{linear(5, "n1", 1), linear(5, "n1", 1), linear(9, "n1", 7)};
    CHECK(dominanceLevels(aligned) == std::vector<size_t>{1, 1, 2});
}

TEST_CASE("straight-line functions produce one exact path") {
    Contract c = mustParse(R"(
contract S {
    uint total = 5;
    function bump(uint d) {
        uint x = 1;
        x = x + d;
        total = x;
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 1);
    CHECK(set.paths[0].function == "bump");
    CHECK(set.paths[0].loopVars.empty());
    GasFormula f = pathGasFormula(set.paths[0], CostTable::defaults());
    REQUIRE(f.isConstant());
    CHECK(f.constantValue() == Rat(static_cast<int64_t>(runGas(c, "bump", {U256(3)}))));
}

TEST_CASE("branches fork paths and stay exact per side") {
    Contract c = mustParse(R"(
contract B {
    uint acc = 0;
    function pick(bool hi) {
        if (hi) {
            acc = 7;
        } else {
            acc = acc + 1;
        }
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 2);
    CostTable tbl = CostTable::defaults();
    GasFormula thenF = pathGasFormula(set.paths[0], tbl);
    GasFormula elseF = pathGasFormula(set.paths[1], tbl);
    CHECK(thenF.constantValue() == Rat(static_cast<int64_t>(runGas(c, "pick", {U256(1)}))));
    CHECK(elseF.constantValue() == Rat(static_cast<int64_t>(runGas(c, "pick", {U256(0)}))));
    CHECK_FALSE(thenF == elseF);

    GasFormula expect = expectedGasFormula(c, tbl);
    GasFormula half = scale(thenF + elseF, Rat(1, 2));
    CHECK(expect == half);

    GasFormula pinned = expectedGasFormula(c, tbl, {Rat(1), Rat(0)});
    CHECK(pinned == thenF);
    CHECK_THROWS_AS(expectedGasFormula(c, tbl, {Rat(1)}), std::invalid_argument);
}

TEST_CASE("literal-false branches and requires are pruned") {
    Contract gated = mustParse(R"(
contract G {
    uint x = 0;
    function f(bool b) {
        if (b) {
            require(false);
        }
        x = 1;
    }
}
)");
    PathSet set = enumeratePaths(gated);
    REQUIRE(set.paths.size() == 1);
    CHECK(pathGasFormula(set.paths[0], CostTable::defaults()).constantValue() ==
          Rat(static_cast<int64_t>(runGas(gated, "f", {U256(0)}))));

    Contract skipped = mustParse(R"(
contract W {
    uint x = 0;
    function f() {
        while (false) {
            x = x + 1;
        }
        x = 2;
    }
}
)");
    PathSet wset = enumeratePaths(skipped);
    REQUIRE(wset.paths.size() == 1);
    CHECK(wset.paths[0].loopVars.empty());
    CHECK(pathGasFormula(wset.paths[0], CostTable::defaults()).constantValue() ==
          Rat(static_cast<int64_t>(runGas(skipped, "f"))));
}

TEST_CASE("loop formulas are linear and match the interpreter at fixed trips") {
    Contract c = mustParse(R"(
contract L {
    function run(uint n) {
        uint i = 0;
        while (i < n) {
            i = i + 1;
        }
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 1);
    REQUIRE(set.paths[0].loopVars == std::vector<std::string>{"n1"});
    GasFormula f = pathGasFormula(set.paths[0], CostTable::defaults());
    CHECK(f.terms().size() == 2);
    for (uint64_t trips : {0u, 1u, 2u, 5u}) {
        uint64_t gas = runGas(c, "run", {U256(trips)});
        CHECK(evaluate(f, {{"n1", Rat(static_cast<int64_t>(trips))}}) ==
              Rat(static_cast<int64_t>(gas)));
    }
    CHECK(expectedGasFormula(c, CostTable::defaults()) == f);
}

TEST_CASE("a branch inside a loop yields two paths sharing one trip variable") {
    Contract c = mustParse(R"(
contract LB {
    uint acc = 1;
    function run(uint n, bool fat) {
        uint i = 0;
        while (i < n) {
            if (fat) {
                acc = acc + 3;
            } else {
                acc = acc + 1;
            }
            i = i + 1;
        }
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 2);
    CHECK(set.paths[0].loopVars == std::vector<std::string>{"n1"});
    CHECK(set.paths[1].loopVars == std::vector<std::string>{"n1"});
    CostTable tbl = CostTable::defaults();
    GasFormula fatF = pathGasFormula(set.paths[0], tbl);
    GasFormula leanF = pathGasFormula(set.paths[1], tbl);
    for (uint64_t trips : {0u, 2u, 5u}) {
        std::map<std::string, Rat> bind{{"n1", Rat(static_cast<int64_t>(trips))}};
        CHECK(evaluate(fatF, bind) ==
              Rat(static_cast<int64_t>(runGas(c, "run", {U256(trips), U256(1)}))));
        CHECK(evaluate(leanF, bind) ==
              Rat(static_cast<int64_t>(runGas(c, "run", {U256(trips), U256(0)}))));
    }
}

TEST_CASE("nested loops multiply trip variables exactly") {
    Contract c = mustParse(R"(
contract N {
    uint acc = 1;
    function grid(uint n, uint m) {
        uint i = 0;
        while (i < n) {
            uint j = 0;
            while (j < m) {
                acc = acc + 1;
                j = j + 1;
            }
            i = i + 1;
        }
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 1);
    CHECK(set.paths[0].loopVars == std::vector<std::string>{"n1", "n2"});
    GasFormula f = pathGasFormula(set.paths[0], CostTable::defaults());
    bool hasProduct = std::any_of(f.terms().begin(), f.terms().end(), [](const Term& t) {
        return t.vars == std::vector<std::string>{"n1", "n2"};
    });
    CHECK(hasProduct);
    for (auto [n, m] : std::vector<std::pair<uint64_t, uint64_t>>{{0, 0}, {1, 3}, {2, 2}, {5, 1}}) {
        std::map<std::string, Rat> bind{{"n1", Rat(static_cast<int64_t>(n))},
                                        {"n2", Rat(static_cast<int64_t>(m))}};
        CHECK(evaluate(f, bind) ==
              Rat(static_cast<int64_t>(runGas(c, "grid", {U256(n), U256(m)}))));
    }
}

TEST_CASE("a return inside a loop becomes a first-iteration exit path") {
    Contract c = mustParse(R"(
contract E {
    function find(uint n, uint t) returns (uint) {
        uint i = 0;
        while (i < n) {
            if (i == t) {
                return i;
            }
            i = i + 1;
        }
        return n;
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 2);
    const GasPath* summarized = nullptr;
    const GasPath* exiting = nullptr;
    for (const GasPath& p : set.paths)
        (p.loopVars.empty() ? exiting : summarized) = &p;
    REQUIRE(summarized != nullptr);
    REQUIRE(exiting != nullptr);

    CostTable tbl = CostTable::defaults();
    GasFormula exitF = pathGasFormula(*exiting, tbl);
    REQUIRE(exitF.isConstant());
    CHECK(exitF.constantValue() ==
          Rat(static_cast<int64_t>(runGas(c, "find", {U256(9), U256(0)}))));

    GasFormula sumF = pathGasFormula(*summarized, tbl);
    for (uint64_t trips : {0u, 3u}) {
        std::map<std::string, Rat> bind{{"n1", Rat(static_cast<int64_t>(trips))}};
        CHECK(evaluate(sumF, bind) ==
              Rat(static_cast<int64_t>(runGas(c, "find", {U256(trips), U256(trips + 1)}))));
    }
}

TEST_CASE("path explosion is reported, not truncated") {
    std::string body;
    for (int i = 0; i < 10; ++i)
        body += "if (b) { x = x + 1; } else { x = x + 2; }\n";
    Contract c = mustParse("contract X { uint x = 0; function f(bool b) {\n" + body + "} }");
    CHECK_THROWS_AS(enumeratePaths(c), PathExplosion);
    CHECK_THROWS_AS(enumeratePaths(c, 100), PathExplosion);
    PathSet ok = enumeratePaths(c, 2000);
    CHECK(ok.paths.size() == 1024);
}

TEST_CASE("send and mapping steps mirror interpreter pricing") {
    Contract c = mustParse(R"(
contract Pay {
    mapping(address => uint) owed;
    function settle(address who) {
        uint amount = owed[who];
        owed[who] = 0;
        require(who.send(amount));
    }
}
)");
    PathSet set = enumeratePaths(c);
    REQUIRE(set.paths.size() == 1);
    GasFormula f = pathGasFormula(set.paths[0], CostTable::defaults());

    WorldState world = deployState(c);
    world.accounts[U256(1)].balance = 100;
    world.accounts[U256(1)].storage[slotKey("owed", U256(0xabc))] = 40;
    ExecutionEnv env;
    env.function = "settle";
    env.args = {U256(0xabc)};
    env.caller = U256(0xabc);
    ExecutionResult res = execute(c, world, env, CostTable::defaults());
    REQUIRE(res.status == Status::Success);
    CHECK(f.constantValue() == Rat(static_cast<int64_t>(res.gasUsed)));
}

TEST_CASE("quadratic memory tables stay exact for static counts and become atoms in loops") {
    CostTable quad = CostTable::defaults();
    quad.memQuadNum = 512;

    Contract flat = mustParse(R"(
contract F {
    function f() {
        uint a = 1;
        uint b = 2;
        uint c = 3;
    }
}
)");
    PathSet fset = enumeratePaths(flat);
    REQUIRE(fset.paths.size() == 1);
    CHECK(pathGasFormula(fset.paths[0], quad).constantValue() ==
          Rat(static_cast<int64_t>(runGas(flat, "f", {}, 0, quad))));

    Contract loopy = mustParse(R"(
contract Q {
    function f(uint n) {
        uint i = 0;
        while (i < n) {
            uint t = i;
            i = t + 1;
        }
    }
}
)");
    PathSet lset = enumeratePaths(loopy);
    REQUIRE(lset.paths.size() == 1);
    GasFormula lf = pathGasFormula(lset.paths[0], quad);
    bool hasAtom = std::any_of(lf.terms().begin(), lf.terms().end(),
                               [](const Term& t) { return t.atom.has_value(); });
    CHECK(hasAtom);
    CHECK(pathGasFormula(lset.paths[0], quad) == lf);
    CHECK(compareDominance(lf, lf) == DominanceVerdict::NoDominance);

    GasFormula linearF = pathGasFormula(lset.paths[0], CostTable::defaults());
    bool linearAtomFree = std::none_of(linearF.terms().begin(), linearF.terms().end(),
                                       [](const Term& t) { return t.atom.has_value(); });
    CHECK(linearAtomFree);
}

TEST_CASE("lifespan gas sums independent replays and reports divergence") {
    Contract c = mustParse(R"(
contract T {
    uint total = 0;
    function add(uint d) {
        total = total + d;
    }
}
)");
    CostTable tbl = CostTable::defaults();
    CHECK(lifespanGas(c, {}, tbl).totalGas == 0);

    std::vector<TransactionRecord> log;
    uint64_t wantTotal = 0;
    for (uint64_t k = 1; k <= 5; ++k) {
        TransactionRecord rec;
        rec.preState.accounts[U256(1)].balance = 0;
        rec.preState.accounts[U256(1)].storage[slotKey("total")] = U256(10 * k);
        rec.call.caller = U256(0x5);
        rec.call.function = "add";
        rec.call.args = {U256(k)};
        rec.status = Status::Success;

        ExecutionEnv env;
        env.caller = rec.call.caller;
        env.function = rec.call.function;
        env.args = rec.call.args;
        ExecutionResult res = execute(c, worldFromSlice(rec.preState), env, tbl);
        REQUIRE(res.status == Status::Success);
        wantTotal += res.gasUsed;
        log.push_back(rec);
    }
    LifespanResult five = lifespanGas(c, log, tbl);
    CHECK(five.totalGas == wantTotal);
    REQUIRE(five.perTx.size() == 5);
    for (const LifespanEntry& e : five.perTx) {
        CHECK(e.replayed);
        CHECK(e.note.empty());
    }

    log[2].status = Status::RequireFailed; // tamper: replay will disagree
    LifespanResult tampered = lifespanGas(c, log, tbl);
    CHECK(tampered.totalGas == wantTotal);
    CHECK_FALSE(tampered.perTx[2].note.empty());

    TransactionRecord ghost;
    ghost.call.function = "nosuch";
    LifespanResult bad = lifespanGas(c, {ghost}, tbl);
    CHECK_FALSE(bad.perTx[0].replayed);
    CHECK_FALSE(bad.perTx[0].note.empty());
    CHECK(bad.totalGas == 0);
}

TEST_CASE("identical contracts classify as fully joint") {
    Contract c = mustParse(R"(
contract J {
    uint x = 0;
    function f(bool b) {
        if (b) {
            x = 1;
        } else {
            x = 2;
        }
    }
}
)");
    PathPartition part = classifyPaths(c, c);
    CHECK(part.joint.size() == 2);
    CHECK(part.repaired.empty());
    CHECK(part.removed.empty());
    CHECK(part.fresh.empty());
}

TEST_CASE("a one-branch edit classifies that branch repaired, the sibling joint") {
    Contract before = mustParse(R"(
contract R {
    uint x = 0;
    function f(bool b) {
        if (b) {
            x = x + 1;
        } else {
            x = 9;
        }
    }
}
)");
    Contract after = before;
    EditOp e;
    e.kind = EditKind::Replace;
    e.src = {1, 0, 0, 1, 0}; // then-branch assignment
    e.stmt = parseStatement("x = x + 2;");
    REQUIRE(applyEdit(after, e));
    REQUIRE(typecheck(after).ok());

    PathPartition part = classifyPaths(before, after);
    CHECK(part.joint.size() == 1);
    CHECK(part.repaired.size() == 1);
    CHECK(part.removed.empty());
    CHECK(part.fresh.empty());
}

TEST_CASE("a condition flip from literal true exposes a new path") {
    Contract before = mustParse(R"(
contract C {
    uint x = 0;
    function f(bool b) {
        if (true) {
            x = 1;
        } else {
            x = 2;
        }
    }
}
)");
    Contract after = before;
    EditOp e;
    e.kind = EditKind::Replace;
    e.src = {1, 0, 0, 0};
    e.expr = mkVar("b");
    REQUIRE(applyEdit(after, e));
    REQUIRE(typecheck(after).ok());

    PathSet oldSet = enumeratePaths(before);
    PathSet newSet = enumeratePaths(after);
    REQUIRE(oldSet.paths.size() == 1);
    REQUIRE(newSet.paths.size() == 2);
    PathPartition part = classifyPaths(oldSet, newSet, before, after);
    CHECK(part.joint.empty());
    CHECK(part.repaired.size() == 1);
    CHECK(part.fresh.size() == 1);
}

TEST_CASE("reduced comparison matches the full verdict and reuses joint formulas") {
    Contract base = mustParse(R"(
contract W {
    uint a = 0;
    uint b = 0;
    function f(bool c) {
        if (c) {
            a = a + 1;
        } else {
            b = b + 1;
        }
    }
    function g(uint n) {
        uint i = 0;
        while (i < n) {
            i = i + 1;
        }
    }
}
)");
    CostTable tbl = CostTable::defaults();

    SUBCASE("identity") {
        ReducedComparison same = reducedCompare(base, base, tbl);
        CHECK(same.verdict == DominanceVerdict::NoDominance);
        CHECK(same.partition.joint.size() == 3);
        CHECK(same.reusedFormulas == 3);
        CHECK(same.diffOld.isZero());
        CHECK(same.diffNew.isZero());
        CHECK(same.fullOld == expectedGasFormula(base, tbl));
    }

    SUBCASE("a padded mutant is dominated by its original") {
        Contract padded = base;
        EditOp e;
        e.kind = EditKind::Insert;
        e.dst = {2, 0, 0, 1, 0}; // front of the then-block
        e.stmt = parseStatement("a = 1;");
        REQUIRE(applyEdit(padded, e));
        REQUIRE(typecheck(padded).ok());

        ReducedComparison cmp = reducedCompare(base, padded, tbl);
        CHECK(cmp.verdict == DominanceVerdict::AdominatesB);
        CHECK(cmp.verdict ==
              compareDominance(expectedGasFormula(base, tbl), expectedGasFormula(padded, tbl)));
        CHECK(cmp.reusedFormulas >= 2);
        CHECK_FALSE(cmp.diffNew.isZero());
    }

    SUBCASE("verdicts agree across sampled mutants") {
        std::set<uint64_t> seen;
        size_t compared = 0;
        for (uint64_t seed = 0; seed < 30 && compared < 12; ++seed) {
            for (size_t space : {0u, 1u, 2u}) {
                MutateRequest req{&base, &base, {}, {}, seed * 7 + space, &seen};
                auto r = sampleMutant(space, req);
                if (!r) continue;
                ReducedComparison cmp = reducedCompare(base, r->tree, tbl);
                DominanceVerdict full = compareDominance(expectedGasFormula(base, tbl),
                                                         expectedGasFormula(r->tree, tbl));
                CHECK(cmp.verdict == full);
                ++compared;
            }
        }
        CHECK(compared >= 12);
    }
}

TEST_CASE("random loop-free contracts enumerate constant-formula paths") {
    Rng rng(777);
    gen::GenConfig cfg;
    cfg.allowLoops = false;
    cfg.allowSend = false;
    size_t checkedPaths = 0;
    for (int iter = 0; iter < 25; ++iter) {
        Contract c = gen::randomContract(rng, cfg);
        if (!typecheck(c).ok()) continue;
        PathSet set;
        try {
            set = enumeratePaths(c);
        } catch (const PathExplosion&) {
            continue;
        }
        for (const GasPath& p : set.paths) {
            GasFormula f = pathGasFormula(p, CostTable::defaults());
            REQUIRE(f.isConstant());
            CHECK(f.constantValue() > Rat(0));
            ++checkedPaths;
        }
    }
    CHECK(checkedPaths > 10);
}
