#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gasrepair/detect/detect.hpp"
#include "gasrepair/lang/parser.hpp"
#include "gasrepair/lang/printer.hpp"
#include "gasrepair/lang/typecheck.hpp"
#include "gasrepair/vm/interp.hpp"

using namespace gasrepair;

namespace {

std::vector<Vulnerability> findKind(const Contract& c, VulnKind k) {
    std::vector<Vulnerability> out;
    for (const Vulnerability& v : detectAll(c))
        if (v.kind == k) out.push_back(v);
    return out;
}

size_t countKind(const Contract& c, VulnKind k) { return findKind(c, k).size(); }

} // namespace

TEST_CASE("kind codes round-trip") {
    for (VulnKind k : {VulnKind::ExceptionDisorder, VulnKind::Reentrancy,
                       VulnKind::IntegerOverflow, VulnKind::OrderDependence}) {
        auto back = vulnKindFromCode(vulnKindCode(k));
        REQUIRE(back.has_value());
        CHECK(*back == k);
    }
    CHECK(!vulnKindFromCode("XX").has_value());
}

TEST_CASE("dropped send results are reported with their statement") {
    Contract c = parse("contract C { function pay(address to) { to.send(5); } "
                       "function safe(address to) { bool ok = to.send(5); require(ok); } }");
    auto found = findKind(c, VulnKind::ExceptionDisorder);
    REQUIRE(found.size() == 1);
    CHECK(found[0].location.path == NodePath{0, 0, 0});
    Contract wrapped =
        parse("contract C { function pay(address to) { require(to.send(5)); } }");
    CHECK(countKind(wrapped, VulnKind::ExceptionDisorder) == 0);
}

TEST_CASE("write after send is reentrancy, write before is not") {
    const char* vulnerable = "contract Bank {"
                             " mapping(address => uint) bal;"
                             " function deposit() payable {"
                             "   bal[msg.sender] = bal[msg.sender] + msg.value; }"
                             " function withdraw() {"
                             "   uint amount = bal[msg.sender];"
                             "   require(amount > 0);"
                             "   bool ok = msg.sender.send(amount);"
                             "   require(ok);"
                             "   bal[msg.sender] = 0; } }";
    Contract c = parse(vulnerable);
    auto found = findKind(c, VulnKind::Reentrancy);
    REQUIRE(found.size() == 1);
    // The send sits in the withdraw body's third statement.
    CHECK(found[0].location.path == NodePath{2, 0, 2});

    const char* fixed = "contract Bank {"
                        " mapping(address => uint) bal;"
                        " function deposit() payable {"
                        "   bal[msg.sender] = bal[msg.sender] + msg.value; }"
                        " function withdraw() {"
                        "   uint amount = bal[msg.sender];"
                        "   require(amount > 0);"
                        "   bal[msg.sender] = 0;"
                        "   bool ok = msg.sender.send(amount);"
                        "   require(ok); } }";
    CHECK(countKind(parse(fixed), VulnKind::Reentrancy) == 0);
}

TEST_CASE("reentrancy detection is path-sensitive") {
    // The write and the send live on mutually exclusive branches.
    const char* branchy = "contract C { uint x = 0;"
                          " function f(bool b, address to) {"
                          "   if (b) { bool ok = to.send(1); require(ok); }"
                          "   else { x = 1; } } }";
    CHECK(countKind(parse(branchy), VulnKind::Reentrancy) == 0);

    const char* joined = "contract C { uint x = 0;"
                         " function f(bool b, address to) {"
                         "   if (b) { bool ok = to.send(1); require(ok); }"
                         "   x = 1; } }";
    CHECK(countKind(parse(joined), VulnKind::Reentrancy) == 1);

    // A return between the send and the write cuts the path.
    const char* cut = "contract C { uint x = 0;"
                      " function f(address to) {"
                      "   bool ok = to.send(1);"
                      "   require(ok);"
                      "   return;"
                      "   x = 1; } }";
    CHECK(countKind(parse(cut), VulnKind::Reentrancy) == 0);
}

TEST_CASE("a send inside a loop body that writes is reentrancy") {
    const char* loop = "contract C { uint paid = 0;"
                       " function drip(address to, uint n) {"
                       "   uint i = 0;"
                       "   while (i < n) {"
                       "     bool ok = to.send(1);"
                       "     require(ok);"
                       "     paid = paid + 1;"
                       "     i = i + 1; } } }";
    CHECK(countKind(parse(loop), VulnKind::Reentrancy) == 1);
}

TEST_CASE("the static reentrancy verdict matches the adversary vm") {
    const char* vulnerable = "contract Bank {"
                             " mapping(address => uint) bal;"
                             " function deposit() payable {"
                             "   bal[msg.sender] = bal[msg.sender] + msg.value; }"
                             " function withdraw() {"
                             "   uint amount = bal[msg.sender];"
                             "   require(amount > 0);"
                             "   bool ok = msg.sender.send(amount);"
                             "   require(ok);"
                             "   bal[msg.sender] = 0; } }";
    Contract c = parse(vulnerable);
    REQUIRE(countKind(c, VulnKind::Reentrancy) == 1);

    const U256 adv = 0xbad;
    WorldState w = deployState(c, 1);
    w.accounts[1].balance = 100;
    w.accounts[1].storage[slotKey("bal", adv)] = 10;
    ExecutionEnv env;
    env.caller = adv;
    env.function = "withdraw";
    AdversaryConfig cfg;
    cfg.address = adv;
    cfg.reenterFunction = "withdraw";
    env.adversary = cfg;
    ExecutionResult r = execute(c, w, env, CostTable::defaults());
    REQUIRE(r.status == Status::Success);
    CHECK(r.post.balanceOf(adv) > 10); // drained more than the entitlement
}

TEST_CASE("unguarded arithmetic is flagged and guards clear it") {
    Contract bad = parse("contract T { mapping(address => uint) b;"
                         " function move(address to, uint v) {"
                         "   b[msg.sender] = b[msg.sender] - v;"
                         "   b[to] = b[to] + v; } }");
    auto found = findKind(bad, VulnKind::IntegerOverflow);
    CHECK(found.size() == 2);

    Contract good = parse("contract T { mapping(address => uint) b;"
                          " function move(address to, uint v) {"
                          "   require(b[msg.sender] >= v);"
                          "   b[msg.sender] = b[msg.sender] - v;"
                          "   require(b[to] + v >= b[to]);"
                          "   b[to] = b[to] + v; } }");
    CHECK(countKind(good, VulnKind::IntegerOverflow) == 0);

    // Writing any key of a mapping invalidates guards over other keys,
    // because the keys may alias.
    Contract aliased = parse("contract T { mapping(address => uint) b;"
                             " function move(address to, uint v) {"
                             "   require(b[to] + v >= b[to]);"
                             "   b[msg.sender] = 0;"
                             "   b[to] = b[to] + v; } }");
    CHECK(countKind(aliased, VulnKind::IntegerOverflow) == 1);
}

TEST_CASE("each arithmetic guard template is recognized") {
    auto clean = [](const char* src) {
        return countKind(parse(src), VulnKind::IntegerOverflow) == 0;
    };
    CHECK(clean("contract C { function f(uint a, uint b) {"
                " require(a + b >= a); uint r = a + b; } }"));
    CHECK(clean("contract C { function f(uint a, uint b) {"
                " require(a + b >= b); uint r = a + b; } }"));
    CHECK(clean("contract C { function f(uint a, uint b) {"
                " require(a >= b); uint r = a - b; } }"));
    CHECK(clean("contract C { function f(uint a, uint b) {"
                " require(b <= a); uint r = a - b; } }"));
    CHECK(clean("contract C { function f(uint a, uint b) {"
                " require(b == 0 || (a * b) / b == a); uint r = a * b; } }"));
    CHECK(!clean("contract C { function f(uint a, uint b) { uint r = a * b; } }"));
    CHECK(!clean("contract C { function f(uint a, uint b) {"
                 " require(a >= b); uint r = a + b; } }")); // wrong shape for add
}

TEST_CASE("guards work through conjunctions and if conditions") {
    CHECK(countKind(parse("contract C { function f(uint a, uint b) {"
                          " require(a >= b && a + b >= a);"
                          " uint d = a - b; uint s = a + b; } }"),
                    VulnKind::IntegerOverflow) == 0);
    CHECK(countKind(parse("contract C { uint t = 0; function f(uint a) {"
                          " if (t + a >= t) { t = t + a; } } }"),
                    VulnKind::IntegerOverflow) == 0);
    // The then-branch fact does not leak past the if.
    CHECK(countKind(parse("contract C { uint t = 0; function f(uint a) {"
                          " if (t + a >= t) { } t = t + a; } }"),
                    VulnKind::IntegerOverflow) == 1);
}

TEST_CASE("writing an operand kills the guard") {
    CHECK(countKind(parse("contract C { function f(uint a, uint b) {"
                          " require(a >= b);"
                          " a = a + 77;" // literal operand: not itself a finding
                          " uint d = a - b; } }"),
                    VulnKind::IntegerOverflow) == 1);
    CHECK(countKind(parse("contract C { uint t = 0; function f(uint a) {"
                          " require(t + a >= t);"
                          " uint i = 0;"
                          " while (i < a) { t = t + a; i = i + 1; } } }"),
                    VulnKind::IntegerOverflow) == 1); // t changes across iterations
}

TEST_CASE("literal operands are exempt from overflow findings") {
    CHECK(countKind(parse("contract C { function f(uint n) {"
                          " uint i = 0; while (i < n) { i = i + 1; } } }"),
                    VulnKind::IntegerOverflow) == 0);
}

TEST_CASE("cross-function state steering a send amount is order dependence") {
    const char* market = "contract Market { uint price = 10; address seller;"
                         " function setPrice(uint p) { price = p; }"
                         " function refund(address buyer) {"
                         "   bool ok = buyer.send(price); require(ok); } }";
    Contract c = parse(market);
    auto found = findKind(c, VulnKind::OrderDependence);
    REQUIRE(found.size() == 1);
    CHECK(found[0].note.find("price") != std::string::npos);

    // Same-function write only: not order dependent.
    const char* solo = "contract C { uint fee = 1;"
                       " function pay(address to) { fee = 2;"
                       "   bool ok = to.send(fee); require(ok); } }";
    CHECK(countKind(parse(solo), VulnKind::OrderDependence) == 0);

    // Taint flows through locals.
    const char* laundered = "contract C { uint rate = 3;"
                            " function tune(uint r) { rate = r; }"
                            " function out(address to) {"
                            "   uint amt = rate * 2;"
                            "   bool ok = to.send(amt); require(ok); } }";
    CHECK(countKind(parse(laundered), VulnKind::OrderDependence) == 1);

    // Per-sender mapping entitlements are not order dependence.
    const char* ledger = "contract C { mapping(address => uint) owed;"
                         " function credit(address to) payable {"
                         "   owed[to] = owed[to] + msg.value; }"
                         " function claim() {"
                         "   uint amt = owed[msg.sender];"
                         "   owed[msg.sender] = 0;"
                         "   bool ok = msg.sender.send(amt); require(ok); } }";
    CHECK(countKind(parse(ledger), VulnKind::OrderDependence) == 0);
}

TEST_CASE("findings are sorted, deduplicated, and kind-filtered") {
    const char* multi = "contract M { uint pool = 0;"
                        " function fund() payable { pool = pool + msg.value; }"
                        " function leak(address to) {"
                        "   to.send(pool);"
                        "   pool = 0; } }";
    Contract c = parse(multi);
    auto all = detectAll(c);
    REQUIRE(all.size() >= 3); // ED + RE + IO + TOD candidates
    for (size_t i = 1; i < all.size(); ++i) {
        bool ordered = all[i - 1] < all[i] || all[i - 1] == all[i];
        CHECK(ordered);
        CHECK(!(all[i - 1] == all[i]));
    }
    auto onlyEd = detect(c, {VulnKind::ExceptionDisorder});
    REQUIRE(onlyEd.size() == 1);
    CHECK(onlyEd[0].kind == VulnKind::ExceptionDisorder);
}

TEST_CASE("findings are stable across print and reparse") {
    const char* multi = "contract M { uint pool = 0;"
                        " function fund() payable { pool = pool + msg.value; }"
                        " function leak(address to) {"
                        "   to.send(pool);"
                        "   pool = 0; } }";
    Contract c1 = parse(multi);
    Contract c2 = parse(prettyPrint(c1));
    auto a = detectAll(c1);
    auto b = detectAll(c2);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].kind == b[i].kind);
        CHECK(a[i].location.path == b[i].location.path);
    }
}

TEST_CASE("a clean contract yields no findings") {
    const char* clean = "contract Clean { mapping(address => uint) b; uint total = 0;"
                        " function deposit() payable {"
                        "   require(b[msg.sender] + msg.value >= b[msg.sender]);"
                        "   require(total + msg.value >= total);"
                        "   b[msg.sender] = b[msg.sender] + msg.value;"
                        "   total = total + msg.value; }"
                        " function withdraw(uint amt) {"
                        "   require(b[msg.sender] >= amt);"
                        "   require(total >= amt);"
                        "   b[msg.sender] = b[msg.sender] - amt;"
                        "   total = total - amt;"
                        "   require(msg.sender.send(amt)); } }";
    Contract c = parse(clean);
    REQUIRE(typecheck(c).ok());
    CHECK(detectAll(c).empty());
}
