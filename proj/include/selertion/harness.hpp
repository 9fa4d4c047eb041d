#pragma once

// Verification machinery: deterministic source mutants, a brute-force
// affected-test oracle (outcome diff plus exhaustive call tracing), the
// selection-ratio metrics, and comment/whitespace perturbation used to
// check checksum robustness.

#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "selertion/select.hpp"

namespace selertion {

// --- metrics ---------------------------------------------------------------

struct Metrics {
    double selectedTestRatio = 0.0;
    double selectedAssertionRatio = 0.0;
    long long analysisMillis = 0;
    long long executionMillis = 0;
};

// Selected assertions: all assertions of classes in Gamma_C and methods
// in Gamma_M, plus one per slice; selected tests: distinct methods with
// anything selected. Parameterized classes count their assertions once.
inline Metrics compute_metrics(const SelectionResult& r, const TestInventory& inv) {
    long long totalAsserts = 0, totalTests = 0;
    for (auto& tc : inv.testClasses) {
        for (auto& tm : tc.testMethods) {
            totalAsserts += tm.assertionCount;
            ++totalTests;
        }
    }

    long long selAsserts = 0;
    std::set<std::string> selTests;
    for (auto& fq : r.gammaC) {
        const TestClassInfo* ci = inv.find_class(fq);
        if (!ci) continue;
        for (auto& tm : ci->testMethods) {
            selAsserts += tm.assertionCount;
            selTests.insert(tm.signature);
        }
    }
    for (auto& sig : r.gammaM) {
        const TestMethodInfo* mi = inv.find_method(sig);
        if (mi) selAsserts += mi->assertionCount;
        selTests.insert(sig);
    }
    for (auto& [_, s] : r.gammaA) {
        selAsserts += 1;
        selTests.insert(s.methodSignature);
    }

    Metrics m;
    if (totalTests > 0) m.selectedTestRatio = double(selTests.size()) / double(totalTests);
    if (totalAsserts > 0) m.selectedAssertionRatio = double(selAsserts) / double(totalAsserts);
    return m;
}

inline std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string render_metrics(const Metrics& m) {
    std::vector<std::vector<std::string>> rows = {
        {"analysisMillis", std::to_string(m.analysisMillis)},
        {"executionMillis", std::to_string(m.executionMillis)},
        {"selectedAssertionRatio", format_ratio(m.selectedAssertionRatio)},
        {"selectedTestRatio", format_ratio(m.selectedTestRatio)},
    };
    return tsv_render(rows);
}

// --- mutation generator ----------------------------------------------------

struct MutantInfo {
    std::string mutationOp;  // arithmeticOpReplace | relationalOpReplace |
                             // constantReplace | statementDelete
    std::string file;        // relative path of the mutated file
    std::string methodSignature;
    std::string description;
};

namespace detail {

struct MutTarget {
    std::string path;
    ast::File file;
};

struct MutSite {
    size_t fileIdx = 0;
    std::string methodSig;
    std::string description;
    std::function<void()> apply;
};

inline bool is_arith_op(const std::string& op) {
    return op == "+" || op == "-" || op == "*" || op == "/" || op == "%";
}

inline bool is_rel_op(const std::string& op) {
    return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
}

inline std::string flip_arith(const std::string& op) {
    if (op == "+") return "-";
    if (op == "-") return "+";
    if (op == "*") return "+";
    return "*";  // "/" and "%" become "*" to keep evaluation total
}

inline std::string flip_rel(const std::string& op) {
    if (op == "<") return ">";
    if (op == "<=") return ">";
    if (op == ">") return "<";
    if (op == ">=") return "<";
    if (op == "==") return "!=";
    return "==";
}

// Sites inside one method body, walked in deterministic source order.
inline void collect_expr_sites(ast::Expr& e, size_t fileIdx, const std::string& sig,
                               std::vector<MutSite> (&byOp)[4]) {
    if (e.tag == ast::Expr::Tag::Binary) {
        ast::Expr* node = &e;
        if (is_arith_op(e.text))
            byOp[0].push_back({fileIdx, sig, "replace '" + e.text + "' with '" +
                                                 flip_arith(e.text) + "'",
                               [node] { node->text = flip_arith(node->text); }});
        if (is_rel_op(e.text))
            byOp[1].push_back({fileIdx, sig, "replace '" + e.text + "' with '" +
                                                 flip_rel(e.text) + "'",
                               [node] { node->text = flip_rel(node->text); }});
    }
    if (e.tag == ast::Expr::Tag::IntLit) {
        ast::Expr* node = &e;
        byOp[2].push_back({fileIdx, sig, "replace constant " + e.text,
                           [node] {
                               node->intVal += 1;
                               node->text = std::to_string(node->intVal);
                           }});
    }
    if (e.tag == ast::Expr::Tag::FloatLit) {
        ast::Expr* node = &e;
        byOp[2].push_back({fileIdx, sig, "replace constant " + e.text,
                           [node] {
                               node->floatVal += 1.0;
                               char buf[40];
                               std::snprintf(buf, sizeof buf, "%.6f", node->floatVal);
                               node->text = buf;
                           }});
    }
    if (e.lhs) collect_expr_sites(*e.lhs, fileIdx, sig, byOp);
    if (e.rhs) collect_expr_sites(*e.rhs, fileIdx, sig, byOp);
    for (auto& a : e.args) collect_expr_sites(*a, fileIdx, sig, byOp);
}

inline void collect_stmt_sites(ast::Stmt& st, size_t fileIdx, const std::string& sig,
                               std::vector<MutSite> (&byOp)[4]) {
    if (st.target) collect_expr_sites(*st.target, fileIdx, sig, byOp);
    if (st.expr) collect_expr_sites(*st.expr, fileIdx, sig, byOp);
    if (st.cond) collect_expr_sites(*st.cond, fileIdx, sig, byOp);
    for (auto& a : st.args) collect_expr_sites(*a, fileIdx, sig, byOp);
    if (st.init) collect_stmt_sites(*st.init, fileIdx, sig, byOp);
    if (st.update) collect_stmt_sites(*st.update, fileIdx, sig, byOp);
    for (auto& s : st.body) collect_stmt_sites(*s, fileIdx, sig, byOp);
    for (auto& s : st.elseBody) collect_stmt_sites(*s, fileIdx, sig, byOp);
}

inline void collect_body_deletions(std::vector<ast::StmtPtr>& body, size_t fileIdx,
                                   const std::string& sig, std::vector<MutSite> (&byOp)[4]) {
    if (body.size() >= 2) {
        for (size_t i = 0; i < body.size(); ++i) {
            if (body[i]->tag == ast::Stmt::Tag::Return) continue;
            std::vector<ast::StmtPtr>* b = &body;
            byOp[3].push_back({fileIdx, sig, "delete statement " + std::to_string(i),
                               [b, i] { b->erase(b->begin() + long(i)); }});
        }
    }
    for (auto& st : body) {
        for (auto* nested : {&st->body, &st->elseBody})
            if (!nested->empty()) collect_body_deletions(*nested, fileIdx, sig, byOp);
    }
}

inline void collect_class_sites(ast::ClassDecl& c, const std::string& outerFq, size_t fileIdx,
                                std::vector<MutSite> (&byOp)[4]) {
    std::string fq = outerFq.empty() ? c.name : outerFq + "." + c.name;
    for (auto& m : c.methods) {
        std::string sig = method_signature(fq, m);
        for (auto& st : m.body) collect_stmt_sites(*st, fileIdx, sig, byOp);
        collect_body_deletions(m.body, fileIdx, sig, byOp);
    }
    for (auto& n : c.nested) collect_class_sites(*n, fq, fileIdx, byOp);
}

}  // namespace detail

// Deterministic per seed: applies exactly one mutation inside one
// production method and emits the result as a new revision directory.
inline MutantInfo generate_mutant(const fs::path& projectRoot, unsigned long long seed,
                                  const fs::path& outRoot) {
    std::vector<detail::MutTarget> targets;
    std::vector<std::string> allPaths = list_source_files(projectRoot);
    for (auto& rel : allPaths) {
        if (is_test_path(rel)) continue;  // mutate production code only
        detail::MutTarget t;
        t.path = rel;
        t.file = parse_minij(read_file(projectRoot / rel));
        targets.push_back(std::move(t));
    }

    std::vector<detail::MutSite> byOp[4];
    for (size_t i = 0; i < targets.size(); ++i)
        for (auto& c : targets[i].file.classes) detail::collect_class_sites(*c, "", i, byOp);

    static const char* kOpNames[4] = {"arithmeticOpReplace", "relationalOpReplace",
                                      "constantReplace", "statementDelete"};
    std::mt19937_64 rng(seed);
    size_t opIdx = size_t(rng() % 4);
    for (int tries = 0; byOp[opIdx].empty() && tries < 4; ++tries) opIdx = (opIdx + 1) % 4;
    if (byOp[opIdx].empty()) throw StoreError("no mutable site in production code");
    detail::MutSite& site = byOp[opIdx][size_t(rng() % byOp[opIdx].size())];
    site.apply();

    fs::create_directories(outRoot);
    for (auto& rel : allPaths) {
        const detail::MutTarget* mutated = nullptr;
        for (size_t i = 0; i < targets.size(); ++i)
            if (targets[i].path == rel) mutated = &targets[i];
        if (mutated && &targets[site.fileIdx] == mutated)
            write_file_atomic(outRoot / rel, pretty_print(mutated->file));
        else
            write_file_atomic(outRoot / rel, read_file(projectRoot / rel));
    }

    MutantInfo info;
    info.mutationOp = kOpNames[opIdx];
    info.file = targets[site.fileIdx].path;
    info.methodSignature = site.methodSig;
    info.description = site.description;
    return info;
}

// --- brute-force affected-test oracle --------------------------------------

// Test methods (by signature, runtime class) whose outcome differs
// between full runs of the two revisions, plus methods whose exhaustive
// call trace on V2 intersects the change set.
inline std::set<std::string> oracle_affected_entities(const fs::path& rootV1,
                                                      const fs::path& rootV2) {
    Project p1 = load_project(rootV1);
    TestInventory inv1 = enumerate_tests(p1);
    TestReport r1 = run_tests(p1, inv1);

    Project p2 = load_project(rootV2);
    TestInventory inv2 = enumerate_tests(p2);
    RunOptions opts;
    opts.traceCalls = true;
    TestReport r2 = run_tests(p2, inv2, opts);

    std::map<std::string, Outcome> o1;
    for (auto& e : r1.results) o1[e.entityId] = e.outcome;

    ChecksumStore s1 = compute_store(p1);
    ChangeSet delta = compute_changes(s1, p2);
    std::set<std::string> changedSigs, changedClasses;
    for (auto& m : delta.methodChanges) changedSigs.insert(m.signature);
    for (auto& c : delta.classChanges) changedClasses.insert(c.fqName);

    std::set<std::string> affected;
    for (auto& e : r2.results) {
        std::string sig = e.entityId.substr(2);
        auto it = o1.find(e.entityId);
        if (it == o1.end() || it->second != e.outcome) {
            affected.insert(sig);
            continue;
        }
        auto tr = r2.tracedCalls.find(e.entityId);
        if (tr == r2.tracedCalls.end()) continue;
        for (auto& called : tr->second) {
            if (changedSigs.count(called) || changedClasses.count(slices_class_of(called))) {
                affected.insert(sig);
                break;
            }
        }
    }
    return affected;
}

// --- comment/whitespace perturbation ---------------------------------------

// Randomized formatting-only edits: indentation, trailing blanks, blank
// lines, line comments and block comments. Token stream is unchanged,
// so smart checksums must be too.
inline std::string perturb_formatting(const std::string& text, std::mt19937_64& rng) {
    std::string out;
    for (auto& line : split(text, '\n')) {
        std::string l = line;
        bool hasString = l.find('"') != std::string::npos;
        if (!l.empty() && rng() % 4 == 0) out += std::string(1 + rng() % 3, ' ');
        if (!hasString && !l.empty() && rng() % 5 == 0) out += "/* note */ ";
        out += l;
        if (rng() % 4 == 0) out += std::string(1 + rng() % 2, ' ');
        if (!hasString && rng() % 5 == 0) out += " // note";
        out += "\n";
        if (rng() % 6 == 0) out += "\n";
    }
    return out;
}

}  // namespace selertion
