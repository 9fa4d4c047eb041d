#pragma once

// Change-to-test mapping: project the ChangeSet through the dependency
// database into selected entities at assertion, method, or class level;
// rewrite test classes so that executing the rewritten suite evaluates
// exactly the selection; restore originals afterward.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "selertion/fingerprint.hpp"
#include "selertion/runtime.hpp"
#include "selertion/slicer.hpp"

namespace selertion {

struct SliceSel {
    std::string methodSignature;
    int assertionIndex = 0;
    int criterionOrdinal = 0;  // statement ordinal of the assertion

    std::string entity_id() const {
        return "S=" + methodSignature + "@" + std::to_string(criterionOrdinal);
    }
};

struct SelectionResult {
    std::map<std::string, SliceSel> gammaA;  // entity id -> slice
    std::set<std::string> gammaM;            // method signatures
    std::set<std::string> gammaC;            // class fq names
    std::map<std::string, std::string> triggers;  // manifest entity id -> change
    std::map<std::string, std::string> rewrittenFiles;  // path -> generated source

    bool empty() const { return gammaA.empty() && gammaM.empty() && gammaC.empty(); }

    bool method_selected(const std::string& sig) const {
        if (gammaM.count(sig)) return true;
        if (gammaC.count(slices_class_of(sig))) return true;
        for (auto& [_, s] : gammaA)
            if (s.methodSignature == sig) return true;
        return false;
    }
};

// Dependency retrieval for one change entry: method-level changes match
// by exact signature membership; class-level changes match any
// signature declared by the class.
inline std::set<std::string> retrieve_test_entities(const DependencyDB& db,
                                                    const std::string& change,
                                                    bool classLevelChange) {
    std::set<std::string> out;
    for (auto& [id, sigs] : db.entries) {
        if (classLevelChange) {
            for (auto& s : sigs) {
                if (starts_with(s, change + "#")) {
                    out.insert(id);
                    break;
                }
            }
        } else if (sigs.count(change)) {
            out.insert(id);
        }
    }
    return out;
}

namespace detail {

struct SelectState {
    SelectionResult result;
    const Project* p = nullptr;
    const TestInventory* inv = nullptr;
    const SliceStore* slices = nullptr;

    void trigger(const std::string& entity, const std::string& change) {
        result.triggers.emplace(entity, change);
    }

    void add_class(const std::string& fq, const std::string& change) {
        if (!p->find_class(fq)) return;  // deleted class: nothing to run
        result.gammaC.insert(fq);
        trigger("C=" + fq, change);
    }

    void add_method(const std::string& sig, const std::string& change) {
        if (!p->find_method(sig)) return;  // deleted method: removal only
        std::string cls = slices_class_of(sig);
        const TestClassInfo* ci = inv->find_class(cls);
        if (ci && classify_selectability(*inv, *p, cls).level == Level::Class) {
            add_class(cls, change);
            return;
        }
        result.gammaM.insert(sig);
        trigger("M=" + sig, change);
    }

    void add_statement_entity(const std::string& id, const std::string& change) {
        // S=<sig>@<ordinal>
        auto at = id.rfind('@');
        std::string sig = id.substr(2, at - 2);
        int ordinal = std::stoi(id.substr(at + 1));
        const MethodModel* mm = p->find_method(sig);
        if (!mm) return;  // method removed: selection-for-removal only
        auto sl = slices->find(sig);
        bool stale = ordinal >= int(mm->statements.size()) || sl == slices->end() ||
                     sl->second.empty();
        if (!stale) {
            bool any = false;
            for (auto& s : sl->second) {
                for (int o : s.statements) {
                    if (o == ordinal) {
                        SliceSel sel{sig, s.assertionIndex, s.criterion()};
                        result.gammaA.emplace(sel.entity_id(), sel);
                        trigger(sel.entity_id(), change);
                        any = true;
                        break;
                    }
                }
            }
            if (any) return;
        }
        // stale ordinal, no slices, or a statement outside every slice:
        // fall back to the whole method — staleness must never drop tests
        add_method(sig, change);
    }

    void map_entity(const std::string& id, const std::string& change) {
        if (starts_with(id, "C=")) {
            add_class(id.substr(2), change);
        } else if (starts_with(id, "M=")) {
            add_method(id.substr(2), change);
        } else if (starts_with(id, "S=")) {
            add_statement_entity(id, change);
        }
    }
};

}  // namespace detail

inline SelectionResult select_tests(const Project& p, const TestInventory& inv,
                                    const SliceStore& slices, const DependencyDB& db,
                                    const ChangeSet& delta) {
    detail::SelectState st;
    st.p = &p;
    st.inv = &inv;
    st.slices = &slices;

    for (auto& c : delta.classChanges) {
        if (c.isTest && c.reason != ClassChangeReason::Deleted) st.add_class(c.fqName, c.fqName);
        for (auto& id : retrieve_test_entities(db, c.fqName, true))
            st.map_entity(id, c.fqName);
    }

    for (auto& m : delta.methodChanges) {
        if (m.isTest) {
            const std::string cls = slices_class_of(m.signature);
            const MethodModel* mm = p.find_method(m.signature);
            if (mm && mm->isTest) {
                st.add_method(m.signature, m.signature);  // changed tests always run
            } else if (!mm || mm->isBefore || mm->isBeforeClass || mm->isConstructor) {
                // changed/removed setup or constructor affects every test
                // of the class; plain helpers are covered by retrieval
                st.add_class(cls, m.signature);
            }
        }
        for (auto& id : retrieve_test_entities(db, m.signature, false))
            st.map_entity(id, m.signature);
    }

    // maximal-granularity exclusivity: the coarser selection wins
    SelectionResult& r = st.result;
    for (auto it = r.gammaM.begin(); it != r.gammaM.end();)
        it = r.gammaC.count(slices_class_of(*it)) ? r.gammaM.erase(it) : ++it;
    for (auto it = r.gammaA.begin(); it != r.gammaA.end();) {
        const std::string& sig = it->second.methodSignature;
        if (r.gammaM.count(sig) || r.gammaC.count(slices_class_of(sig)))
            it = r.gammaA.erase(it);
        else
            ++it;
    }
    return r;
}

// --- selection manifest ----------------------------------------------------

inline std::string render_selection_manifest(const SelectionResult& r) {
    std::vector<std::vector<std::string>> rows;
    auto trig = [&](const std::string& id) {
        auto it = r.triggers.find(id);
        return it == r.triggers.end() ? std::string("-") : it->second;
    };
    for (auto& [id, _] : r.gammaA) rows.push_back({"A", id, trig(id)});
    for (auto& sig : r.gammaM) rows.push_back({"M", "M=" + sig, trig("M=" + sig)});
    for (auto& fq : r.gammaC) rows.push_back({"C", "C=" + fq, trig("C=" + fq)});
    return tsv_render(rows);
}

// --- rewriting -------------------------------------------------------------

namespace detail {

inline std::string indent_block(const std::string& text, int spaces) {
    std::string pad(size_t(spaces), ' ');
    std::string out;
    for (auto& line : split(text, '\n')) {
        if (!line.empty()) out += pad + line;
        out += "\n";
    }
    while (ends_with(out, "\n\n")) out.pop_back();
    return out;
}

// Generated @Test methods for the selected slices of one test method,
// ordered by assertion ordinal; each body is the slice's statements in
// original order.
inline std::string render_slice_methods(const MethodModel& mm,
                                        const std::vector<const SliceSel*>& sels,
                                        const SliceStore& slices) {
    Printer pr;
    std::string out;
    auto storeIt = slices.find(mm.signature);
    for (auto* sel : sels) {
        const AssertionSlice* slice = nullptr;
        for (auto& s : storeIt->second)
            if (s.assertionIndex == sel->assertionIndex) slice = &s;
        if (!slice) continue;
        out += "  @Test\n";
        out += "  " + std::string(mm.decl->returnType) + " " + mm.name + "__slice" +
               std::to_string(sel->assertionIndex) + "() {\n";
        for (int ord : slice->statements)
            out += indent_block(pr.print_stmt_text(*mm.statements[size_t(ord)].node), 4);
        out += "  }\n";
    }
    return out;
}

inline std::string render_selected_class(const ClassModel& cm, const SelectionResult& r,
                                         const SliceStore& slices) {
    Printer pr;
    const ast::ClassDecl& c = *cm.decl;
    std::string out;
    for (auto& a : c.annotations) {
        out += "@" + a.name;
        if (!a.params.empty()) {
            out += "(";
            for (size_t i = 0; i < a.params.size(); ++i) {
                if (i) out += ", ";
                out += a.params[i].first + "=" + a.params[i].second;
            }
            out += ")";
        }
        out += "\n";
    }
    out += std::string(c.isEnum ? "enum " : "class ") + c.name;
    if (!c.superName.empty()) out += " extends " + c.superName;
    out += " {\n";

    size_t fi = 0, mi = 0, ni = 0;
    for (ast::MemberKind k : c.memberOrder) {
        switch (k) {
            case ast::MemberKind::EnumConsts: {
                out += "  ";
                for (size_t i = 0; i < c.enumConsts.size(); ++i) {
                    if (i) out += ", ";
                    out += c.enumConsts[i];
                }
                out += ";\n";
                break;
            }
            case ast::MemberKind::Field: {
                std::string tmp;
                {
                    Printer fp;
                    const ast::FieldDecl& f = c.fields[fi];
                    tmp = std::string(f.isStatic ? "static " : "") + f.typeName + " " + f.name;
                    if (f.init) tmp += " = " + fp.print_expr_text(*f.init);
                    tmp += ";";
                }
                out += "  " + tmp + "\n";
                ++fi;
                break;
            }
            case ast::MemberKind::Method: {
                const MethodModel& mm = cm.methods[mi++];
                if (!mm.isTest) {
                    out += indent_block(pr.print_method_text(*mm.decl), 2);
                    break;
                }
                if (r.gammaM.count(mm.signature)) {
                    out += indent_block(pr.print_method_text(*mm.decl), 2);
                    break;
                }
                std::vector<const SliceSel*> sels;
                for (auto& [_, s] : r.gammaA)
                    if (s.methodSignature == mm.signature) sels.push_back(&s);
                if (!sels.empty()) {
                    std::sort(sels.begin(), sels.end(),
                              [](const SliceSel* a, const SliceSel* b) {
                                  return a->assertionIndex < b->assertionIndex;
                              });
                    out += render_slice_methods(mm, sels, slices);
                }
                // unselected test methods are omitted
                break;
            }
            case ast::MemberKind::Nested: {
                out += indent_block(pr.print_class_text(*c.nested[ni++]), 2);
                break;
            }
        }
    }
    out += "}\n";
    return out;
}

}  // namespace detail

// Generate rewritten test sources so that a plain full run of the tests
// tree executes exactly the selection. Every file holding a test class
// is rewritten; unaffected test classes are omitted from their file,
// non-test classes are kept verbatim, classes in Gamma_C are copied
// unmodified.
inline std::map<std::string, std::string> rewrite_tests(const Project& p,
                                                        const TestInventory& inv,
                                                        const SliceStore& slices,
                                                        const SelectionResult& r) {
    std::map<std::string, std::string> out;
    if (r.empty()) return out;
    Printer pr;
    for (auto& sf : p.files) {
        if (!is_test_path(sf.path)) continue;
        bool hasTestClass = false;
        for (auto& cm : sf.classes)
            if (inv.find_class(cm.fqName)) hasTestClass = true;
        if (!hasTestClass) continue;

        std::string text;
        for (auto& cm : sf.classes) {
            if (!inv.find_class(cm.fqName)) {
                text += pr.print_class_text(*cm.decl);  // non-test class kept
                continue;
            }
            if (r.gammaC.count(cm.fqName)) {
                text += pr.print_class_text(*cm.decl);  // copied unmodified
                continue;
            }
            bool affected = false;
            for (auto& mm : cm.methods)
                if (mm.isTest && r.method_selected(mm.signature)) affected = true;
            if (!affected) continue;  // whole class unselected: omitted
            text += detail::render_selected_class(cm, r, slices);
        }
        out[sf.path] = text;
    }
    return out;
}

// --- working-tree swap -----------------------------------------------------

// Backs up originals and installs the rewritten sources.
inline void apply_rewrite(const fs::path& projectRoot, const fs::path& backupDir,
                          const std::map<std::string, std::string>& rewrittenFiles) {
    for (auto& [rel, text] : rewrittenFiles) {
        write_file_atomic(backupDir / rel, read_file(projectRoot / rel));
        write_file_atomic(projectRoot / rel, text);
    }
}

// Puts original test sources back byte-identically; idempotent no-op
// when no rewrite is active.
inline void restore_tests(const fs::path& projectRoot, const fs::path& backupDir) {
    if (!fs::exists(backupDir)) return;
    for (auto& e : fs::recursive_directory_iterator(backupDir)) {
        if (!e.is_regular_file()) continue;
        fs::path rel = fs::relative(e.path(), backupDir);
        write_file_atomic(projectRoot / rel, read_file(e.path()));
    }
    fs::remove_all(backupDir);
}

}  // namespace selertion
