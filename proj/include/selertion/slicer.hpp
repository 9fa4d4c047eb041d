#pragma once

// Assertion slicing: a data-dependence PDG per eligible test method and
// one backward slice per assertion. Methods that cannot be sliced are
// classified for method- or class-level selection instead.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "selertion/frontend.hpp"
#include "selertion/util.hpp"

namespace selertion {

enum class Level { Assertion, Method, Class };

enum class LevelReason {
    Sliceable,
    NoAssertions,
    Conditionals,
    ExpectedException,
    OutOfScopeCall,
    Parameterized,
    Inheritance,
    CallsOtherTests
};

struct SelectionLevel {
    Level level = Level::Assertion;
    LevelReason reason = LevelReason::Sliceable;
};

inline const char* level_prefix(Level l) {
    switch (l) {
        case Level::Assertion: return "S";
        case Level::Method: return "M";
        case Level::Class: return "C";
    }
    return "?";
}

// Class-level reasons dominate method-level reasons dominate assertion
// level. With no method signature given, returns the class-wide level.
inline SelectionLevel classify_selectability(const TestInventory& inv, const Project& p,
                                             const std::string& classFq,
                                             const std::string& methodSig = "") {
    const TestClassInfo* ci = inv.find_class(classFq);
    if (!ci) throw LinkError("unknown test class " + classFq);
    if (ci->parameterized) return {Level::Class, LevelReason::Parameterized};
    if (ci->usesInheritance) return {Level::Class, LevelReason::Inheritance};
    if (ci->callsOtherTests) return {Level::Class, LevelReason::CallsOtherTests};
    if (methodSig.empty()) return {Level::Assertion, LevelReason::Sliceable};

    const TestMethodInfo* mi = inv.find_method(methodSig);
    if (!mi) throw LinkError("unknown test method " + methodSig);
    if (!mi->expectsException.empty()) return {Level::Method, LevelReason::ExpectedException};
    if (mi->hasConditionals) return {Level::Method, LevelReason::Conditionals};
    if (mi->assertionCount == 0) return {Level::Method, LevelReason::NoAssertions};
    const MethodModel* mm = p.find_method(methodSig);
    if (mm) {
        for (auto& st : mm->statements)
            if (st.outOfScope) return {Level::Method, LevelReason::OutOfScopeCall};
    }
    return {Level::Assertion, LevelReason::Sliceable};
}

// --- PDG -------------------------------------------------------------------

struct Pdg {
    int nodeCount = 0;
    // preds[v] = statements v data-depends on; edges point backward only
    std::vector<std::set<int>> preds;

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int v = 0; v < nodeCount; ++v)
            for (int u : preds[v]) out.emplace_back(u, v);
        return out;
    }
};

namespace detail {

struct UnionFind {
    std::map<std::string, std::string> parent;
    std::string find(const std::string& x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = x;
            return x;
        }
        if (it->second == x) return x;
        std::string root = find(it->second);
        parent[x] = root;
        return root;
    }
    void unite(const std::string& a, const std::string& b) { parent[find(a)] = find(b); }
    bool same(const std::string& a, const std::string& b) { return find(a) == find(b); }
};

}  // namespace detail

// Data-dependence edges: u -> v when v uses a variable defined at u
// (nearest preceding def), or when u is a mutating invocation whose
// receiver/arguments alias a variable v uses.
inline Pdg build_pdg(const MethodModel& method) {
    const auto& stmts = method.statements;
    Pdg pdg;
    pdg.nodeCount = int(stmts.size());
    pdg.preds.resize(stmts.size());

    // conservative transitive alias closure over the whole method
    detail::UnionFind aliases;
    for (auto& st : stmts) {
        for (auto& group : st.aliasGroups) {
            auto it = group.begin();
            const std::string& first = *it;
            for (++it; it != group.end(); ++it) aliases.unite(first, *it);
        }
    }

    for (size_t v = 0; v < stmts.size(); ++v) {
        for (const std::string& x : stmts[v].uses) {
            // nearest preceding def
            for (int u = int(v) - 1; u >= 0; --u) {
                if (stmts[u].defs.count(x)) {
                    pdg.preds[v].insert(u);
                    break;
                }
            }
            // every preceding mutating call on anything aliasing x
            for (size_t u = 0; u < v; ++u) {
                for (const std::string& mv : stmts[u].mutates) {
                    if (mv == x || aliases.same(mv, x)) {
                        pdg.preds[v].insert(int(u));
                        break;
                    }
                }
            }
        }
    }
    return pdg;
}

// --- assertion slices ------------------------------------------------------

struct AssertionSlice {
    std::string methodSignature;
    int assertionIndex = 0;           // 1-based position among the method's assertions
    std::vector<int> statements;      // statement ordinals, ascending; last is the criterion
    std::set<std::string> criterionVars;

    int criterion() const { return statements.back(); }
};

inline std::vector<AssertionSlice> slice_assertions(const MethodModel& method, const Pdg& pdg) {
    std::vector<AssertionSlice> out;
    int assertionIndex = 0;
    for (auto& st : method.statements) {
        if (!st.isAssert) continue;
        ++assertionIndex;
        AssertionSlice slice;
        slice.methodSignature = method.signature;
        slice.assertionIndex = assertionIndex;
        slice.criterionVars = st.uses;

        std::set<int> nodes;
        std::vector<int> work{st.ordinal};
        while (!work.empty()) {
            int v = work.back();
            work.pop_back();
            if (!nodes.insert(v).second) continue;
            for (int u : pdg.preds[v]) work.push_back(u);
        }
        slice.statements.assign(nodes.begin(), nodes.end());
        out.push_back(std::move(slice));
    }
    return out;
}

// --- slice store (.selertion/slices/) --------------------------------------

using SliceStore = std::map<std::string, std::vector<AssertionSlice>>;  // methodSig -> slices

inline std::string slices_class_of(const std::string& methodSig) {
    return methodSig.substr(0, methodSig.find('#'));
}

inline std::string render_class_slices(const std::vector<AssertionSlice>& slices) {
    std::vector<std::vector<std::string>> rows;
    for (auto& s : slices) {
        std::vector<std::string> ords;
        for (int o : s.statements) ords.push_back(std::to_string(o));
        rows.push_back({s.methodSignature, std::to_string(s.assertionIndex), join(ords, ",")});
    }
    return tsv_render(rows);
}

inline void save_slices_for_class(const fs::path& slicesDir, const std::string& classFq,
                                  const std::vector<AssertionSlice>& slices) {
    write_file_atomic(slicesDir / (classFq + ".slices"), render_class_slices(slices));
}

inline SliceStore load_slice_store(const fs::path& slicesDir) {
    SliceStore store;
    if (!fs::exists(slicesDir)) return store;
    for (auto& e : fs::directory_iterator(slicesDir)) {
        if (e.path().extension() != ".slices") continue;
        for (auto& row : tsv_parse(read_file(e.path()))) {
            AssertionSlice s;
            s.methodSignature = row[0];
            s.assertionIndex = std::stoi(row[1]);
            for (auto& o : split(row[2], ',')) s.statements.push_back(std::stoi(o));
            store[s.methodSignature].push_back(std::move(s));
        }
    }
    for (auto& [_, v] : store)
        std::sort(v.begin(), v.end(), [](const AssertionSlice& a, const AssertionSlice& b) {
            return a.assertionIndex < b.assertionIndex;
        });
    return store;
}

// Slices for every assertion-level method of one test class.
inline std::vector<AssertionSlice> compute_class_slices(const Project& p,
                                                        const TestInventory& inv,
                                                        const std::string& classFq) {
    std::vector<AssertionSlice> out;
    const TestClassInfo* ci = inv.find_class(classFq);
    if (!ci) return out;
    for (auto& tmi : ci->testMethods) {
        SelectionLevel lvl = classify_selectability(inv, p, classFq, tmi.signature);
        if (lvl.level != Level::Assertion) continue;
        const MethodModel* mm = p.find_method(tmi.signature);
        if (!mm) continue;
        Pdg pdg = build_pdg(*mm);
        for (auto& s : slice_assertions(*mm, pdg)) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace selertion
