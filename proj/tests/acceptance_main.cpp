// Acceptance suite: one pass/fail line per criterion, exit 0 only when
// every criterion holds.

#include <array>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "selertion/driver.hpp"
#include "test_helpers.hpp"

using namespace selertion;
namespace fs = std::filesystem;

namespace {

int gFailures = 0;

void report(int index, const std::string& title, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << index << ": " << title;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++gFailures;
}

void run_criterion(int index, const std::string& title,
                   const std::function<void(std::string&)>& body) {
    bool ok = true;
    std::string detail;
    try {
        body(detail);
        ok = detail.empty();
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    report(index, title, ok, detail);
}

// Driver commands print their reports; keep acceptance output clean.
template <typename Fn>
int quiet(Fn&& fn) {
    std::ostringstream sink;
    std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
    int rc;
    try {
        rc = fn();
    } catch (...) {
        std::cout.rdbuf(old);
        throw;
    }
    std::cout.rdbuf(old);
    return rc;
}

const std::vector<std::string> kProjects = {"complexmath", "inherit", "params",
                                            "expects",     "loops",   "chain"};

struct ProjectBase {
    std::string name;
    Project p;
    TestInventory inv;
    ChecksumStore sums;
    SliceStore slices;
    DependencyDB dbAssertion;  // deps from the normal instrumentation plan
    DependencyDB dbMethod;     // deps with assertion level forced down to method

    explicit ProjectBase(const std::string& projName)
        : name(projName), p(load_project(testutil::corpus(projName))) {
        inv = enumerate_tests(p);
        sums = compute_store(p);
        for (auto& tc : inv.testClasses)
            for (auto& s : compute_class_slices(p, inv, tc.fqName))
                slices[s.methodSignature].push_back(s);
        testutil::TempDir instr;
        install_instrumented_copy(p, inv, instr.path, false);
        dbAssertion = collect_dependencies(instr.path);
        install_instrumented_copy(p, inv, instr.path, true);
        dbMethod = collect_dependencies(instr.path);
    }
};

std::string fmt_sets(const std::vector<std::vector<int>>& sets) {
    std::string out;
    for (auto& s : sets) {
        out += "{";
        for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
        out += "}";
    }
    return out;
}

// --- criterion 1: golden slices --------------------------------------------

void criterion1(std::string& detail) {
    Project p = load_project(testutil::corpus("complexmath"));
    TestInventory inv = enumerate_tests(p);
    auto slices = compute_class_slices(p, inv, "ComplexTest");
    if (slices.size() != 5) {
        detail = "expected 5 slices, got " + std::to_string(slices.size());
        return;
    }
    std::vector<std::vector<int>> exp, neg;
    for (auto& s : slices) {
        if (s.methodSignature == "ComplexTest#testExp()") exp.push_back(s.statements);
        if (s.methodSignature == "ComplexTest#testNegate()") neg.push_back(s.statements);
    }
    std::vector<std::vector<int>> wantExp = {{0, 1, 2}, {3}, {4, 5}};
    std::vector<std::vector<int>> wantNeg = {{0, 1, 2}, {0, 1, 3}};
    if (exp != wantExp) detail = "testExp slices " + fmt_sets(exp);
    if (neg != wantNeg) detail += " testNegate slices " + fmt_sets(neg);
}

// --- criterion 2: golden selection via the full driver ---------------------

void criterion2(std::string& detail) {
    testutil::TempDir work;
    testutil::copy_tree(testutil::corpus("complexmath"), work.path);
    DriverOptions opts;
    opts.projectDir = work.path;
    opts.storeDir = work.path / ".selertion";
    if (quiet([&] { return cmd_init(opts); }) != 0) {
        detail = "init failed";
        return;
    }
    testutil::edit_file(work.path / "src" / "Complex.mj", "new Complex(0.0 - re, 0.0 - im)",
                        "new Complex(re, im)");
    std::string rev = compute_store(load_project(work.path)).revisionId;
    quiet([&] { return cmd_run(opts); });  // broken negate: expected nonzero exit

    auto rows = tsv_parse(read_file(opts.storeDir / "selection" / (rev + ".tsv")));
    std::set<std::string> ids;
    for (auto& row : rows) {
        if (row[0] != "A") detail = "non-slice row in selection: " + row[1];
        ids.insert(row[1]);
    }
    std::set<std::string> want = {"S=ComplexTest#testExp()@5", "S=ComplexTest#testNegate()@2",
                                  "S=ComplexTest#testNegate()@3"};
    if (ids != want) {
        detail = "selected entities:";
        for (auto& id : ids) detail += " " + id;
        return;
    }

    std::string ratio;
    for (auto& row : tsv_parse(read_file(opts.storeDir / "metrics" / (rev + ".tsv"))))
        if (row[0] == "selectedAssertionRatio") ratio = row[1];
    if (ratio != "0.600000") detail = "selectedAssertionRatio " + ratio;
}

// --- criteria 3 and 4: safety sweep + precision dominance ------------------

struct SweepOutcome {
    int mutants = 0;
    int misses = 0;
    bool dominanceViolated = false;
    bool strictSomewhere = false;
    std::string firstMiss;
};

void run_sweep(SweepOutcome& sw) {
    for (auto& name : kProjects) {
        ProjectBase base(name);
        bool strictInProject = false;
        for (unsigned long long seed = 1; seed <= 17; ++seed) {
            testutil::TempDir v2;
            generate_mutant(testutil::corpus(name), seed, v2.path);
            Project p2 = load_project(v2.path);
            TestInventory inv2 = enumerate_tests(p2);
            ChangeSet delta = compute_changes(base.sums, p2);

            SelectionResult selA =
                select_tests(p2, inv2, base.slices, base.dbAssertion, delta);
            for (auto& sig : oracle_affected_entities(testutil::corpus(name), v2.path)) {
                if (!selA.method_selected(sig)) {
                    ++sw.misses;
                    if (sw.firstMiss.empty())
                        sw.firstMiss = name + " seed " + std::to_string(seed) + " " + sig;
                }
            }

            SelectionResult selM = select_tests(p2, inv2, base.slices, base.dbMethod, delta);
            double ra = compute_metrics(selA, inv2).selectedAssertionRatio;
            double rm = compute_metrics(selM, inv2).selectedAssertionRatio;
            if (ra > rm) sw.dominanceViolated = true;
            if (ra < rm) strictInProject = true;
            ++sw.mutants;
        }
        if (strictInProject) sw.strictSomewhere = true;
    }
}

// --- criterion 5: checksum robustness --------------------------------------

void criterion5(std::string& detail) {
    // originals per project
    std::map<std::string, ChecksumStore> baseSums;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sources;
    for (auto& name : kProjects) {
        Project p = load_project(testutil::corpus(name));
        baseSums[name] = compute_store(p);
        for (auto& f : p.files) sources[name].emplace_back(f.path, f.text);
    }

    std::mt19937_64 rng(2026);
    int falsePositives = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::string& name = kProjects[size_t(i) % kProjects.size()];
        Project perturbed;
        perturbed.root = testutil::corpus(name);
        for (auto& [rel, text] : sources[name])
            perturbed.files.push_back(parse_source(perturb_formatting(text, rng), rel));
        perturbed.index();
        if (!compute_changes(baseSums[name], perturbed).empty()) ++falsePositives;
    }
    if (falsePositives) {
        detail = std::to_string(falsePositives) + " formatting perturbations flagged";
        return;
    }

    // one in-method token edit per project must register
    const std::vector<std::array<std::string, 4>> edits = {
        {"complexmath", "src/MathUtil.mj", "n < 24", "n < 25"},
        {"inherit", "src/Calc.mj", "a + b", "a - b"},
        {"params", "src/Adder.mj", "a + b", "b + a"},
        {"expects", "src/Div.mj", "a / b", "a % b"},
        {"loops", "src/Acc.mj", "total + i", "total + i + 0"},
        {"chain", "src/Counter.mj", "value + 1", "value + 2"},
    };
    for (auto& [name, rel, from, to] : edits) {
        Project edited;
        edited.root = testutil::corpus(name);
        for (auto& [path, text] : sources[name]) {
            std::string t = text;
            if (path == rel) {
                auto pos = t.find(from);
                if (pos == std::string::npos) {
                    detail = "edit target missing in " + name + "/" + rel;
                    return;
                }
                t.replace(pos, from.size(), to);
            }
            edited.files.push_back(parse_source(t, path));
        }
        edited.index();
        if (compute_changes(baseSums[name], edited).empty()) {
            detail = "token edit in " + name + "/" + rel + " went undetected";
            return;
        }
    }
}

// --- criterion 6: incremental instrumentation equivalence ------------------

void criterion6(std::string& detail) {
    testutil::TempDir work, instr, fresh;
    testutil::copy_tree(testutil::corpus("complexmath"), work.path);
    Project p = load_project(work.path);
    TestInventory inv = enumerate_tests(p);
    install_instrumented_copy(p, inv, instr.path);
    ChecksumStore prev = compute_store(p);

    struct Rev {
        const char* file;
        const char* from;
        const char* to;
    };
    const std::vector<Rev> revs = {
        {"src/Complex.mj", "return re;", "return re + 0.0;"},
        {"src/MathUtil.mj", "n < 24", "n < 26"},
        {"tests/ComplexTest.mj", "assertEq(z.getImag(), 2.5);",
         "assertEq(z.getImag(), 2.5);\n    assertTrue(true);"},
        {"src/Complex.mj", "class Complex {", "// revision note\nclass Complex {"},
        {"src/Complex.mj", "static Complex zero() {",
         "Complex scale(float k) {\n    return new Complex(re * k, im * k);\n  }\n\n"
         "  static Complex zero() {"},
        {"src/MathUtil.mj", "n < 14", "n < 15"},
        {"tests/ComplexTest.mj", "assertEq(z.getImag(), 2.5);\n    assertTrue(true);",
         "assertEq(z.getImag(), 2.5);"},
        {"src/Complex.mj", "re * k", "k * re"},
        {"src/MathUtil.mj", "n < 26", "n < 27"},
        {"src/MathUtil.mj", "float expf(float x) {", "float expf(float x)   {"},
    };

    for (size_t i = 0; i < revs.size(); ++i) {
        testutil::edit_file(work.path / revs[i].file, revs[i].from, revs[i].to);
        Project now = load_project(work.path);
        TestInventory nowInv = enumerate_tests(now);
        ChecksumStore nowSums = compute_store(now);
        size_t changedFiles = 0;
        for (auto& [path, sum] : nowSums.fileSums) {
            auto it = prev.fileSums.find(path);
            if (it == prev.fileSums.end() || it->second != sum) ++changedFiles;
        }
        auto rewritten = sync_instrumented_copy(now, nowInv, instr.path);
        if (rewritten.size() != changedFiles) {
            detail = "revision " + std::to_string(i + 1) + ": rewrote " +
                     std::to_string(rewritten.size()) + " files, " +
                     std::to_string(changedFiles) + " changed";
            return;
        }
        prev = nowSums;
    }

    Project fin = load_project(work.path);
    TestInventory finInv = enumerate_tests(fin);
    install_instrumented_copy(fin, finInv, fresh.path);
    auto listing = [](const fs::path& root) {
        std::map<std::string, std::string> out;
        for (auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file())
                out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
        return out;
    };
    if (listing(instr.path) != listing(fresh.path))
        detail = "synced copy differs from from-scratch instrumentation";
}

// --- criterion 7: slice executability --------------------------------------

void criterion7(std::string& detail) {
    // every sliceable corpus method: its slices rerun green and cover
    // each assertion exactly once
    for (auto& name : kProjects) {
        Project p = load_project(testutil::corpus(name));
        TestInventory inv = enumerate_tests(p);
        SliceStore slices;
        std::vector<AssertionSlice> all;
        for (auto& tc : inv.testClasses)
            for (auto& s : compute_class_slices(p, inv, tc.fqName)) {
                slices[s.methodSignature].push_back(s);
                all.push_back(s);
            }
        if (all.empty()) continue;

        SelectionResult sel;
        for (auto& s : all) {
            SliceSel ss{s.methodSignature, s.assertionIndex, s.criterion()};
            sel.gammaA.emplace(ss.entity_id(), ss);
        }
        testutil::TempDir work;
        testutil::copy_tree(testutil::corpus(name), work.path);
        auto files = rewrite_tests(p, inv, slices, sel);
        apply_rewrite(work.path, work.path / ".backup", files);
        TestReport r = execute_tests(work.path);
        if (r.failures + r.errors != 0) {
            detail = name + ": slice run not green";
            return;
        }
        // one executed slice method per assertion of each sliced method
        std::map<std::string, int> ran;  // fq#name -> slice results
        for (auto& e : r.results) {
            std::string rest = e.entityId.substr(2);
            auto hash = rest.find('#');
            std::string methodName = rest.substr(hash + 1, rest.find('(') - hash - 1);
            ran[rest.substr(0, hash + 1) + strip_slice_suffix(methodName)]++;
        }
        for (auto& [sig, v] : slices) {
            if (v.empty()) continue;
            std::string key = sig.substr(0, sig.find('('));
            if (ran[key] != int(v.size())) {
                detail = name + ": " + key + " ran " + std::to_string(ran[key]) +
                         " slices, expected " + std::to_string(v.size());
                return;
            }
        }
    }

    // masking case: with negate broken, both testNegate assertions
    // report failures in one run, while the original stops at the first
    testutil::TempDir work;
    testutil::copy_tree(testutil::corpus("complexmath"), work.path);
    testutil::edit_file(work.path / "src" / "Complex.mj", "new Complex(0.0 - re, 0.0 - im)",
                        "new Complex(re, im)");
    Project p = load_project(work.path);
    TestInventory inv = enumerate_tests(p);
    SliceStore slices;
    for (auto& s : compute_class_slices(p, inv, "ComplexTest"))
        slices[s.methodSignature].push_back(s);

    TestReport original = execute_tests(work.path);
    long long originalNegateAsserts = -1;
    for (auto& e : original.results)
        if (e.entityId == "M=ComplexTest#testNegate()") originalNegateAsserts = e.assertionsEvaluated;
    if (originalNegateAsserts != 1) {
        detail = "original run should stop at the first failed assertion";
        return;
    }

    SelectionResult sel;
    for (auto& s : slices["ComplexTest#testNegate()"]) {
        SliceSel ss{s.methodSignature, s.assertionIndex, s.criterion()};
        sel.gammaA.emplace(ss.entity_id(), ss);
    }
    auto files = rewrite_tests(p, inv, slices, sel);
    apply_rewrite(work.path, work.path / ".backup", files);
    TestReport sliced = execute_tests(work.path);
    int negateFails = 0;
    for (auto& e : sliced.results)
        if (starts_with(e.entityId, "M=ComplexTest#testNegate__slice") &&
            e.outcome == Outcome::Fail)
            ++negateFails;
    if (negateFails != 2)
        detail = "masking case: " + std::to_string(negateFails) + " slice failures, expected 2";
}

// --- criterion 8: downgrade coverage ---------------------------------------

void criterion8(std::string& detail) {
    auto deps_of = [](const std::string& name) {
        Project p = load_project(testutil::corpus(name));
        TestInventory inv = enumerate_tests(p);
        testutil::TempDir instr;
        install_instrumented_copy(p, inv, instr.path);
        return collect_dependencies(instr.path);
    };
    auto ids_of = [](const DependencyDB& db) {
        std::set<std::string> out;
        for (auto& [id, _] : db.entries) out.insert(id);
        return out;
    };

    // expected entity prefixes per project
    {
        auto ids = ids_of(deps_of("complexmath"));
        for (auto& id : ids)
            if (!starts_with(id, "S=")) {
                detail = "complexmath entity " + id;
                return;
            }
    }
    for (const char* name : {"inherit", "params", "chain"}) {
        auto ids = ids_of(deps_of(name));
        if (ids.empty()) {
            detail = std::string(name) + ": no entities";
            return;
        }
        for (auto& id : ids)
            if (!starts_with(id, "C=")) {
                detail = std::string(name) + " entity " + id;
                return;
            }
    }
    {
        auto ids = ids_of(deps_of("expects"));
        if (!ids.count("M=DivTest#testDivZero()")) {
            detail = "expects: missing method-level entity";
            return;
        }
        bool sliceEntity = false;
        for (auto& id : ids)
            if (starts_with(id, "S=DivTest#testDivExact()@")) sliceEntity = true;
        if (!sliceEntity) {
            detail = "expects: missing statement-level entities";
            return;
        }
    }
    {
        auto ids = ids_of(deps_of("loops"));
        if (ids != std::set<std::string>{"M=AccTest#testSumLoop()"}) {
            detail = "loops: unexpected entity set";
            return;
        }
    }

    // selection path per project for a production change
    const std::vector<std::array<std::string, 4>> edits = {
        {"complexmath", "src/Complex.mj", "new Complex(0.0 - re, 0.0 - im)",
         "new Complex(re, im)"},
        {"inherit", "src/Calc.mj", "return a * b;", "return b * a;"},
        {"params", "src/Adder.mj", "return a + b;", "return b + a;"},
        {"expects", "src/Div.mj", "return a / b;", "return a / b / 1;"},
        {"loops", "src/Acc.mj", "total = total + i;", "total = i + total;"},
        {"chain", "src/Counter.mj", "value = value + 1;", "value = 1 + value;"},
    };
    for (auto& [name, rel, from, to] : edits) {
        ProjectBase base(name);
        testutil::TempDir work;
        testutil::copy_tree(testutil::corpus(name), work.path);
        testutil::edit_file(work.path / rel, from, to);
        Project p2 = load_project(work.path);
        TestInventory inv2 = enumerate_tests(p2);
        ChangeSet delta = compute_changes(base.sums, p2);
        SelectionResult r = select_tests(p2, inv2, base.slices, base.dbAssertion, delta);

        bool ok = true;
        if (name == "complexmath") ok = !r.gammaA.empty() && r.gammaM.empty() && r.gammaC.empty();
        if (name == "inherit" || name == "params" || name == "chain")
            ok = r.gammaA.empty() && r.gammaM.empty() && !r.gammaC.empty();
        if (name == "loops") ok = r.gammaA.empty() && !r.gammaM.empty() && r.gammaC.empty();
        if (name == "expects") ok = !r.gammaA.empty() && !r.gammaM.empty() && r.gammaC.empty();
        if (!ok) {
            detail = name + ": unexpected selection shape (A=" + std::to_string(r.gammaA.size()) +
                     " M=" + std::to_string(r.gammaM.size()) +
                     " C=" + std::to_string(r.gammaC.size()) + ")";
            return;
        }
    }
}

// --- criterion 9: initial-run rule -----------------------------------------

void criterion9(std::string& detail) {
    testutil::TempDir work;
    testutil::copy_tree(testutil::corpus("complexmath"), work.path);
    DriverOptions opts;
    opts.projectDir = work.path;
    opts.storeDir = work.path / ".selertion";

    if (quiet([&] { return cmd_init(opts); }) != 0) {
        detail = "init exit code nonzero";
        return;
    }
    std::string rev = compute_store(load_project(work.path)).revisionId;
    auto initRows = tsv_parse(read_file(opts.storeDir / "reports" / (rev + ".report.tsv")));
    if (initRows.size() != 2) {
        detail = "init executed " + std::to_string(initRows.size()) + " entities, expected 2";
        return;
    }
    std::string initRatio;
    for (auto& row : tsv_parse(read_file(opts.storeDir / "metrics" / (rev + ".tsv"))))
        if (row[0] == "selectedTestRatio") initRatio = row[1];
    if (initRatio != "1.000000") {
        detail = "init selectedTestRatio " + initRatio;
        return;
    }

    if (quiet([&] { return cmd_run(opts); }) != 0) {
        detail = "unchanged run exit code nonzero";
        return;
    }
    auto runRows = tsv_parse(read_file(opts.storeDir / "reports" / (rev + ".report.tsv")));
    if (!runRows.empty()) {
        detail = "unchanged run executed " + std::to_string(runRows.size()) + " entities";
        return;
    }
    std::string runRatio;
    for (auto& row : tsv_parse(read_file(opts.storeDir / "metrics" / (rev + ".tsv"))))
        if (row[0] == "selectedTestRatio") runRatio = row[1];
    if (runRatio != "0.000000") detail = "unchanged run selectedTestRatio " + runRatio;
}

}  // namespace

int main() {
    run_criterion(1, "golden assertion slices on the complexmath suite", criterion1);
    run_criterion(2, "changing negate selects its three slices at ratio 0.600000", criterion2);

    SweepOutcome sw;
    std::string sweepErr;
    try {
        run_sweep(sw);
    } catch (const std::exception& e) {
        sweepErr = std::string("exception: ") + e.what();
    }
    report(3,
           "safety sweep over " + std::to_string(sw.mutants) + " mutants finds zero misses",
           sweepErr.empty() && sw.mutants >= 100 && sw.misses == 0,
           sweepErr.empty() ? (sw.misses ? "first miss: " + sw.firstMiss
                                         : "only " + std::to_string(sw.mutants) + " mutants")
                            : sweepErr);
    report(4, "assertion-level selection never selects more assertions than method level",
           sweepErr.empty() && !sw.dominanceViolated && sw.strictSomewhere,
           sweepErr.empty()
               ? (sw.dominanceViolated ? "dominance violated" : "no strict improvement found")
               : sweepErr);

    run_criterion(5, "1000 formatting perturbations are invisible, token edits are not",
                  criterion5);
    run_criterion(6, "incremental instrumentation matches from-scratch after 10 revisions",
                  criterion6);
    run_criterion(7, "slices re-run green and expose masked assertion failures", criterion7);
    run_criterion(8, "each corpus project lands on its expected selection level", criterion8);
    run_criterion(9, "initial run executes everything, an unchanged run executes nothing",
                  criterion9);

    return gFailures == 0 ? 0 : 1;
}
