#include <catch2/catch_amalgamated.hpp>

#include "selertion/fingerprint.hpp"
#include "test_helpers.hpp"

using namespace selertion;

namespace {

Project load_copy(const testutil::TempDir& tmp) { return load_project(tmp.path); }

}  // namespace

TEST_CASE("formatting-only edits keep all checksums", "[fingerprint]") {
    testutil::TempDir tmp;
    testutil::copy_tree(testutil::corpus("complexmath"), tmp.path);
    ChecksumStore before = compute_store(load_copy(tmp));

    testutil::edit_file(tmp.path / "src" / "Complex.mj", "Complex negate() {",
                        "/* docs */  Complex   negate( )   { // note");
    ChecksumStore after = compute_store(load_copy(tmp));

    CHECK(before.fileSums == after.fileSums);
    CHECK(before.methodSums == after.methodSums);
    CHECK(before.revisionId == after.revisionId);
    CHECK(compute_changes(before, load_copy(tmp)).empty());
}

TEST_CASE("a single token edit is a method-level change", "[fingerprint]") {
    testutil::TempDir tmp;
    testutil::copy_tree(testutil::corpus("complexmath"), tmp.path);
    ChecksumStore before = compute_store(load_copy(tmp));

    testutil::edit_file(tmp.path / "src" / "Complex.mj", "new Complex(0.0 - re, 0.0 - im)",
                        "new Complex(0.0 - re, im)");
    Project after = load_copy(tmp);
    ChangeSet delta = compute_changes(before, after);

    REQUIRE(delta.classChanges.empty());
    REQUIRE(delta.methodChanges.size() == 1);
    CHECK(delta.methodChanges[0].signature == "Complex#negate()");
    CHECK(delta.methodChanges[0].reason == MethodChangeReason::Changed);
    CHECK_FALSE(delta.methodChanges[0].isTest);
}

TEST_CASE("added and deleted methods", "[fingerprint]") {
    testutil::TempDir tmp;
    testutil::copy_tree(testutil::corpus("complexmath"), tmp.path);
    ChecksumStore before = compute_store(load_copy(tmp));

    SECTION("added") {
        testutil::edit_file(tmp.path / "src" / "Complex.mj", "Complex negate() {",
                            "float magSq() { return re * re + im * im; }\n  Complex negate() {");
        ChangeSet delta = compute_changes(before, load_copy(tmp));
        REQUIRE(delta.methodChanges.size() == 1);
        CHECK(delta.methodChanges[0].signature == "Complex#magSq()");
        CHECK(delta.methodChanges[0].reason == MethodChangeReason::Added);
    }
    SECTION("deleted") {
        testutil::edit_file(tmp.path / "src" / "Complex.mj",
                            "static Complex zero() {\n    return new Complex(0.0, 0.0);\n  }",
                            "");
        ChangeSet delta = compute_changes(before, load_copy(tmp));
        REQUIRE(delta.methodChanges.size() == 1);
        CHECK(delta.methodChanges[0].signature == "Complex#zero()");
        CHECK(delta.methodChanges[0].reason == MethodChangeReason::Deleted);
    }
}

TEST_CASE("class-head and other-declaration changes dominate", "[fingerprint]") {
    testutil::TempDir tmp;
    testutil::copy_tree(testutil::corpus("inherit"), tmp.path);
    ChecksumStore before = compute_store(load_copy(tmp));

    SECTION("head change") {
        testutil::edit_file(tmp.path / "tests" / "CalcExtTest.mj",
                            "class CalcExtTest extends CalcBaseTest", "class CalcExtTest");
        ChangeSet delta = compute_changes(before, load_copy(tmp));
        REQUIRE(delta.classChanges.size() == 1);
        CHECK(delta.classChanges[0].fqName == "CalcExtTest");
        CHECK(delta.classChanges[0].reason == ClassChangeReason::HeadChanged);
        CHECK(delta.classChanges[0].isTest);
        CHECK(delta.methodChanges.empty());
    }
    SECTION("field change") {
        testutil::edit_file(tmp.path / "src" / "Calc.mj", "class Calc {",
                            "class Calc {\n  int lastResult;");
        ChangeSet delta = compute_changes(before, load_copy(tmp));
        REQUIRE(delta.classChanges.size() == 1);
        CHECK(delta.classChanges[0].fqName == "Calc");
        CHECK(delta.classChanges[0].reason == ClassChangeReason::OtherChanged);
        CHECK(delta.methodChanges.empty());
    }
}

TEST_CASE("added override produces a lookup change on the inherited method", "[fingerprint]") {
    testutil::TempDir tmp;
    testutil::copy_tree(testutil::corpus("inherit"), tmp.path);
    write_file_atomic(tmp.path / "src" / "FastCalc.mj",
                      "class FastCalc extends Calc {\n}\n");
    ChecksumStore before = compute_store(load_copy(tmp));

    testutil::edit_file(tmp.path / "src" / "FastCalc.mj", "class FastCalc extends Calc {",
                        "class FastCalc extends Calc {\n"
                        "  int add(int a, int b) { return b + a; }");
    ChangeSet delta = compute_changes(before, load_copy(tmp));
    bool lookup = false;
    for (auto& m : delta.methodChanges)
        if (m.signature == "Calc#add(int,int)" && m.reason == MethodChangeReason::Lookup)
            lookup = true;
    CHECK(lookup);
    CHECK(delta.has_method("FastCalc#add(int,int)"));
}

TEST_CASE("a class moved across files counts as a class-level change", "[fingerprint]") {
    testutil::TempDir tmp;
    testutil::copy_tree(testutil::corpus("params"), tmp.path);
    ChecksumStore before = compute_store(load_copy(tmp));

    std::string text = read_file(tmp.path / "src" / "Adder.mj");
    fs::remove(tmp.path / "src" / "Adder.mj");
    write_file_atomic(tmp.path / "src" / "Arith.mj", text);
    ChangeSet delta = compute_changes(before, load_copy(tmp));
    REQUIRE(delta.classChanges.size() == 1);
    CHECK(delta.classChanges[0].fqName == "Adder");
    CHECK(delta.classChanges[0].reason == ClassChangeReason::Added);
    CHECK(delta.methodChanges.empty());
}

TEST_CASE("checksum store round-trips through disk", "[fingerprint]") {
    testutil::TempDir tmp;
    ChecksumStore store = compute_store(load_project(testutil::corpus("complexmath")));
    save_checksum_store(store, tmp.path / "checksums");
    auto loaded = load_checksum_store(tmp.path / "checksums");
    REQUIRE(loaded.has_value());
    CHECK(loaded->revisionId == store.revisionId);
    CHECK(loaded->fileSums == store.fileSums);
    CHECK(loaded->methodSums == store.methodSums);
    CHECK(loaded->classPath == store.classPath);
}

TEST_CASE("initial run treats every class as newly added", "[fingerprint]") {
    Project p = load_project(testutil::corpus("complexmath"));
    ChangeSet delta = initial_changes(p);
    REQUIRE(delta.classChanges.size() == 3);
    for (auto& c : delta.classChanges) CHECK(c.reason == ClassChangeReason::Added);
    CHECK(delta.has_class("ComplexTest"));
}
