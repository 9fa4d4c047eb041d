#include <catch2/catch_amalgamated.hpp>

#include "selertion/frontend.hpp"
#include "selertion/printer.hpp"
#include "test_helpers.hpp"

using namespace selertion;

TEST_CASE("canonical pretty-print is a fixed point", "[frontend]") {
    Project p = load_project(testutil::corpus("complexmath"));
    for (auto& f : p.files) {
        std::string once = pretty_print(*f.fileAst);
        std::string twice = pretty_print(parse_minij(once));
        REQUIRE(once == twice);
    }
}

TEST_CASE("comments and formatting never reach the canonical form", "[frontend]") {
    std::string a = "class A { int f(int x) { return x + 1; } }";
    std::string b = "// leading\nclass A {\n  /* block */ int f( int x ) {\n"
                    "    return x + 1; // trailing\n  }\n}\n";
    REQUIRE(pretty_print(parse_minij(a)) == pretty_print(parse_minij(b)));
}

TEST_CASE("method signatures use Class#name(types)", "[frontend]") {
    Project p = load_project(testutil::corpus("complexmath"));
    REQUIRE(p.find_method("Complex#Complex(float,float)") != nullptr);
    REQUIRE(p.find_method("Complex#negate()") != nullptr);
    REQUIRE(p.find_method("Complex#plus(Complex)") != nullptr);
    REQUIRE(p.find_method("MathUtil#expf(float)") != nullptr);
    REQUIRE(p.find_method("ComplexTest#testNegate()") != nullptr);
}

TEST_CASE("statement def/use facts for a straight-line test", "[frontend]") {
    Project p = load_project(testutil::corpus("complexmath"));
    const MethodModel* mm = p.find_method("ComplexTest#testNegate()");
    REQUIRE(mm != nullptr);
    REQUIRE(mm->statements.size() == 4);
    CHECK(mm->statements[0].defs == std::set<std::string>{"x"});
    CHECK(mm->statements[1].defs == std::set<std::string>{"z"});
    CHECK(mm->statements[1].uses == std::set<std::string>{"x"});
    CHECK(mm->statements[2].isAssert);
    CHECK(mm->statements[2].uses == std::set<std::string>{"z"});
    CHECK(mm->statements[3].isAssert);
    CHECK(mm->statements[3].uses == std::set<std::string>{"z"});
    // assertions observe only: they are never mutation sources
    CHECK(mm->statements[2].mutates.empty());
    CHECK(mm->statements[3].mutates.empty());
}

TEST_CASE("test inventory flags per corpus project", "[frontend]") {
    SECTION("complexmath: plain assertion-capable class") {
        TestInventory inv = enumerate_tests(load_project(testutil::corpus("complexmath")));
        REQUIRE(inv.testClasses.size() == 1);
        const TestClassInfo& tc = inv.testClasses[0];
        CHECK(tc.fqName == "ComplexTest");
        CHECK_FALSE(tc.parameterized);
        CHECK_FALSE(tc.usesInheritance);
        CHECK_FALSE(tc.callsOtherTests);
        REQUIRE(tc.testMethods.size() == 2);
    }
    SECTION("inherit: both ends of the chain flagged") {
        TestInventory inv = enumerate_tests(load_project(testutil::corpus("inherit")));
        REQUIRE(inv.testClasses.size() == 2);
        for (auto& tc : inv.testClasses) CHECK(tc.usesInheritance);
    }
    SECTION("params: parameterized class") {
        TestInventory inv = enumerate_tests(load_project(testutil::corpus("params")));
        REQUIRE(inv.testClasses.size() == 1);
        CHECK(inv.testClasses[0].parameterized);
    }
    SECTION("chain: test calling another test") {
        TestInventory inv = enumerate_tests(load_project(testutil::corpus("chain")));
        REQUIRE(inv.testClasses.size() == 1);
        CHECK(inv.testClasses[0].callsOtherTests);
    }
    SECTION("expects: expected-exception recorded on the method") {
        TestInventory inv = enumerate_tests(load_project(testutil::corpus("expects")));
        const TestMethodInfo* mi = inv.find_method("DivTest#testDivZero()");
        REQUIRE(mi != nullptr);
        CHECK(mi->expectsException == "DivByZero");
        const TestMethodInfo* plain = inv.find_method("DivTest#testDivExact()");
        REQUIRE(plain != nullptr);
        CHECK(plain->expectsException.empty());
    }
    SECTION("loops: conditionals recorded on the method") {
        TestInventory inv = enumerate_tests(load_project(testutil::corpus("loops")));
        const TestMethodInfo* mi = inv.find_method("AccTest#testSumLoop()");
        REQUIRE(mi != nullptr);
        CHECK(mi->hasConditionals);
    }
}

TEST_CASE("unresolvable superclass fails linking", "[frontend]") {
    testutil::TempDir tmp;
    write_file_atomic(tmp.path / "tests" / "T.mj",
                      "class T extends Missing { @Test void t() { assertTrue(true); } }");
    Project p = load_project(tmp.path);
    REQUIRE_THROWS_AS(enumerate_tests(p), LinkError);
}
