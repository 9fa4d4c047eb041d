#include <catch2/catch_amalgamated.hpp>

#include "selertion/slicer.hpp"
#include "test_helpers.hpp"

using namespace selertion;

namespace {

std::vector<std::vector<int>> ordinal_sets(const std::vector<AssertionSlice>& slices,
                                           const std::string& sig) {
    std::vector<std::vector<int>> out;
    for (auto& s : slices)
        if (s.methodSignature == sig) out.push_back(s.statements);
    return out;
}

}  // namespace

TEST_CASE("golden assertion slices for the complexmath suite", "[slicer]") {
    Project p = load_project(testutil::corpus("complexmath"));
    TestInventory inv = enumerate_tests(p);
    auto slices = compute_class_slices(p, inv, "ComplexTest");
    REQUIRE(slices.size() == 5);

    auto exp = ordinal_sets(slices, "ComplexTest#testExp()");
    REQUIRE(exp == std::vector<std::vector<int>>{{0, 1, 2}, {3}, {4, 5}});

    auto neg = ordinal_sets(slices, "ComplexTest#testNegate()");
    REQUIRE(neg == std::vector<std::vector<int>>{{0, 1, 2}, {0, 1, 3}});
}

TEST_CASE("slice structure invariants", "[slicer]") {
    Project p = load_project(testutil::corpus("complexmath"));
    TestInventory inv = enumerate_tests(p);
    for (auto& s : compute_class_slices(p, inv, "ComplexTest")) {
        REQUIRE_FALSE(s.statements.empty());
        CHECK(std::is_sorted(s.statements.begin(), s.statements.end()));
        const MethodModel* mm = p.find_method(s.methodSignature);
        REQUIRE(mm != nullptr);
        // the criterion is the assertion statement itself
        CHECK(mm->statements[size_t(s.criterion())].isAssert);
        CHECK(s.assertionIndex >= 1);
    }
}

TEST_CASE("pdg edges for a straight-line method", "[slicer]") {
    Project p = load_project(testutil::corpus("complexmath"));
    const MethodModel* mm = p.find_method("ComplexTest#testNegate()");
    REQUIRE(mm != nullptr);
    Pdg pdg = build_pdg(*mm);
    REQUIRE(pdg.nodeCount == 4);
    // z = x.negate() depends on the definition of x
    CHECK(pdg.preds[1].count(0) == 1);
    // both assertions depend on the definition of z
    CHECK(pdg.preds[2].count(1) == 1);
    CHECK(pdg.preds[3].count(1) == 1);
    // assertions depend on nothing later than z
    CHECK(pdg.preds[2].count(3) == 0);
}

TEST_CASE("selectability classification per corpus project", "[slicer]") {
    auto level_of = [](const std::string& proj, const std::string& cls,
                       const std::string& sig = "") {
        Project p = load_project(testutil::corpus(proj));
        TestInventory inv = enumerate_tests(p);
        return classify_selectability(inv, p, cls, sig);
    };

    SECTION("assertion level") {
        auto l = level_of("complexmath", "ComplexTest", "ComplexTest#testNegate()");
        CHECK(l.level == Level::Assertion);
        CHECK(l.reason == LevelReason::Sliceable);
    }
    SECTION("parameterized forces class level") {
        auto l = level_of("params", "AdderTest");
        CHECK(l.level == Level::Class);
        CHECK(l.reason == LevelReason::Parameterized);
    }
    SECTION("inheritance forces class level") {
        auto l = level_of("inherit", "CalcBaseTest");
        CHECK(l.level == Level::Class);
        CHECK(l.reason == LevelReason::Inheritance);
    }
    SECTION("cross-test calls force class level") {
        auto l = level_of("chain", "ChainTest");
        CHECK(l.level == Level::Class);
        CHECK(l.reason == LevelReason::CallsOtherTests);
    }
    SECTION("expected exception forces method level") {
        auto l = level_of("expects", "DivTest", "DivTest#testDivZero()");
        CHECK(l.level == Level::Method);
        CHECK(l.reason == LevelReason::ExpectedException);
    }
    SECTION("conditionals force method level") {
        auto l = level_of("loops", "AccTest", "AccTest#testSumLoop()");
        CHECK(l.level == Level::Method);
        CHECK(l.reason == LevelReason::Conditionals);
    }
    SECTION("the plain method in expects stays assertion level") {
        auto l = level_of("expects", "DivTest", "DivTest#testDivExact()");
        CHECK(l.level == Level::Assertion);
    }
}

TEST_CASE("slice store round-trips through disk", "[slicer]") {
    testutil::TempDir tmp;
    Project p = load_project(testutil::corpus("complexmath"));
    TestInventory inv = enumerate_tests(p);
    auto slices = compute_class_slices(p, inv, "ComplexTest");
    save_slices_for_class(tmp.path, "ComplexTest", slices);

    SliceStore store = load_slice_store(tmp.path);
    REQUIRE(store.count("ComplexTest#testExp()") == 1);
    REQUIRE(store.count("ComplexTest#testNegate()") == 1);
    size_t total = 0;
    for (auto& [sig, v] : store) {
        total += v.size();
        for (auto& loaded : v) {
            bool matched = false;
            for (auto& orig : slices)
                if (orig.methodSignature == sig && orig.assertionIndex == loaded.assertionIndex)
                    matched = orig.statements == loaded.statements;
            CHECK(matched);
        }
    }
    CHECK(total == slices.size());
}

TEST_CASE("mutating calls reach the slice through alias groups", "[slicer]") {
    // c.inc() mutates the object named by c; the assertion on c.get()
    // must pull the mutation into its slice
    std::string src = "class CTest {\n"
                      "  @Test void t() {\n"
                      "    Counter c = new Counter();\n"
                      "    c.inc();\n"
                      "    assertEq(c.get(), 1);\n"
                      "  }\n"
                      "}\n";
    testutil::TempDir tmp;
    write_file_atomic(tmp.path / "tests" / "CTest.mj", src);
    testutil::copy_tree(testutil::corpus("chain") / "src", tmp.path / "src");
    Project p = load_project(tmp.path);
    const MethodModel* mm = p.find_method("CTest#t()");
    REQUIRE(mm != nullptr);
    Pdg pdg = build_pdg(*mm);
    auto slices = slice_assertions(*mm, pdg);
    REQUIRE(slices.size() == 1);
    CHECK(slices[0].statements == std::vector<int>{0, 1, 2});
}
