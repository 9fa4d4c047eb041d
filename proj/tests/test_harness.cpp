#include <catch2/catch_amalgamated.hpp>

#include "selertion/harness.hpp"
#include "test_helpers.hpp"

using namespace selertion;

namespace {

std::string tree_digest(const fs::path& root) {
    std::string all;
    for (auto& rel : list_source_files(root)) all += rel + "\n" + read_file(root / rel) + "\n";
    return all;
}

}  // namespace

TEST_CASE("mutants are deterministic per seed", "[harness]") {
    testutil::TempDir a, b;
    MutantInfo ia = generate_mutant(testutil::corpus("complexmath"), 42, a.path);
    MutantInfo ib = generate_mutant(testutil::corpus("complexmath"), 42, b.path);
    CHECK(ia.mutationOp == ib.mutationOp);
    CHECK(ia.file == ib.file);
    CHECK(ia.description == ib.description);
    CHECK(tree_digest(a.path) == tree_digest(b.path));
}

TEST_CASE("mutants touch production code only and vary across seeds", "[harness]") {
    std::set<std::string> distinct;
    std::set<std::string> ops;
    for (unsigned long long seed = 1; seed <= 100; ++seed) {
        testutil::TempDir out;
        MutantInfo info = generate_mutant(testutil::corpus("complexmath"), seed, out.path);
        CHECK_FALSE(is_test_path(info.file));
        ops.insert(info.mutationOp);
        distinct.insert(info.mutationOp + "|" + info.file + "|" + info.methodSignature + "|" +
                        info.description);
        // tests are byte-identical to the originals
        CHECK(read_file(out.path / "tests" / "ComplexTest.mj") ==
              read_file(testutil::corpus("complexmath") / "tests" / "ComplexTest.mj"));
    }
    CHECK(ops.size() == 4);
    CHECK(distinct.size() >= 30);
}

TEST_CASE("every project yields mutants for every seed", "[harness]") {
    for (const char* name : {"complexmath", "inherit", "params", "expects", "loops", "chain"}) {
        INFO("project " << name);
        testutil::TempDir out;
        MutantInfo info = generate_mutant(testutil::corpus(name), 7, out.path);
        CHECK_FALSE(info.mutationOp.empty());
        REQUIRE_NOTHROW(load_project(out.path));
    }
}

TEST_CASE("oracle finds nothing between identical revisions", "[harness]") {
    auto affected =
        oracle_affected_entities(testutil::corpus("complexmath"), testutil::corpus("complexmath"));
    CHECK(affected.empty());
}

TEST_CASE("oracle attributes a broken method to its dependent tests", "[harness]") {
    testutil::TempDir v2;
    testutil::copy_tree(testutil::corpus("complexmath"), v2.path);
    testutil::edit_file(v2.path / "src" / "Complex.mj", "new Complex(0.0 - re, 0.0 - im)",
                        "new Complex(re, im)");
    auto affected = oracle_affected_entities(testutil::corpus("complexmath"), v2.path);
    CHECK(affected.count("ComplexTest#testNegate()") == 1);
    // testExp also calls negate: covered by the exhaustive trace even
    // though its earlier assertions mask the sign flip outcome change
    CHECK(affected.count("ComplexTest#testExp()") == 1);
}

TEST_CASE("metrics count slices as single assertions", "[harness]") {
    Project p = load_project(testutil::corpus("complexmath"));
    TestInventory inv = enumerate_tests(p);
    SelectionResult r;
    r.gammaA.emplace("S=ComplexTest#testExp()@5", SliceSel{"ComplexTest#testExp()", 3, 5});
    r.gammaA.emplace("S=ComplexTest#testNegate()@2", SliceSel{"ComplexTest#testNegate()", 1, 2});
    r.gammaA.emplace("S=ComplexTest#testNegate()@3", SliceSel{"ComplexTest#testNegate()", 2, 3});
    Metrics m = compute_metrics(r, inv);
    CHECK(m.selectedTestRatio == 1.0);       // both methods contribute slices
    CHECK(m.selectedAssertionRatio == 0.60);  // 3 of 5 assertions
    CHECK(format_ratio(m.selectedAssertionRatio) == "0.600000");
}

TEST_CASE("metrics for method- and class-level selections", "[harness]") {
    Project p = load_project(testutil::corpus("complexmath"));
    TestInventory inv = enumerate_tests(p);

    SelectionResult r;
    r.gammaM.insert("ComplexTest#testNegate()");
    Metrics m = compute_metrics(r, inv);
    CHECK(m.selectedTestRatio == 0.5);
    CHECK(m.selectedAssertionRatio == 0.4);  // 2 of 5

    SelectionResult c;
    c.gammaC.insert("ComplexTest");
    Metrics mc = compute_metrics(c, inv);
    CHECK(mc.selectedTestRatio == 1.0);
    CHECK(mc.selectedAssertionRatio == 1.0);
}

TEST_CASE("formatting perturbation keeps the token stream", "[harness]") {
    std::mt19937_64 rng(123);
    for (const char* rel : {"src/Complex.mj", "src/MathUtil.mj", "tests/ComplexTest.mj"}) {
        std::string original = read_file(testutil::corpus("complexmath") / rel);
        std::string canonical = pretty_print(parse_minij(original));
        for (int i = 0; i < 20; ++i) {
            std::string perturbed = perturb_formatting(original, rng);
            CHECK(pretty_print(parse_minij(perturbed)) == canonical);
        }
    }
}
