#pragma once

// Source instrumentation. Production methods (and test-class helpers,
// treated the same way) get an entry log emitting their own signature.
// Test code gets scope markers matching the selection level of each
// class/method: statement markers, method markers, or a single pair of
// class markers emitted by two synthesized static methods that the
// runner calls around the class. The instrumented tree lives in a
// separate copy that is re-synced incrementally per revision.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "selertion/fingerprint.hpp"
#include "selertion/frontend.hpp"
#include "selertion/slicer.hpp"

namespace selertion {

inline constexpr const char* kClassBeginMethod = "__classBegin__";
inline constexpr const char* kClassEndMethod = "__classEnd__";

struct InstrumentPlan {
    // test classes only; absent key = instrument as production
    std::map<std::string, SelectionLevel> classLevel;
    // per-method level for assertion-capable classes (methodSig -> level)
    std::map<std::string, Level> methodLevel;
};

inline InstrumentPlan build_instrument_plan(const Project& p, const TestInventory& inv,
                                            bool forceMethodLevel = false) {
    InstrumentPlan plan;
    for (auto& tc : inv.testClasses) {
        SelectionLevel cl = classify_selectability(inv, p, tc.fqName);
        plan.classLevel[tc.fqName] = cl;
        if (cl.level == Level::Class) continue;
        for (auto& tm : tc.testMethods) {
            SelectionLevel ml = classify_selectability(inv, p, tc.fqName, tm.signature);
            Level lvl = ml.level;
            if (forceMethodLevel && lvl == Level::Assertion) lvl = Level::Method;
            plan.methodLevel[tm.signature] = lvl;
        }
    }
    return plan;
}

namespace detail {

inline ast::ExprPtr make_string_lit(const std::string& s) {
    auto e = std::make_unique<ast::Expr>();
    e->tag = ast::Expr::Tag::StringLit;
    e->text = s;
    return e;
}

inline ast::StmtPtr make_sys_call(const std::string& fn, const std::string& payload) {
    auto recv = std::make_unique<ast::Expr>();
    recv->tag = ast::Expr::Tag::Name;
    recv->text = "sys";
    auto call = std::make_unique<ast::Expr>();
    call->tag = ast::Expr::Tag::Call;
    call->text = fn;
    call->lhs = std::move(recv);
    call->args.push_back(make_string_lit(payload));
    auto st = std::make_unique<ast::Stmt>();
    st->tag = ast::Stmt::Tag::ExprStmt;
    st->expr = std::move(call);
    return st;
}

inline void prepend_emit(ast::MethodDecl& m, const std::string& sig) {
    m.body.insert(m.body.begin(), make_sys_call("emit", sig));
}

inline void wrap_body(ast::MethodDecl& m, const std::string& scopeId) {
    m.body.insert(m.body.begin(), make_sys_call("scopeBegin", scopeId));
    m.body.push_back(make_sys_call("scopeEnd", scopeId));
}

inline void wrap_statements(ast::MethodDecl& m, const std::string& sigPrefix) {
    std::vector<ast::StmtPtr> out;
    int ordinal = 0;
    for (auto& st : m.body) {
        std::string id = sigPrefix + "@" + std::to_string(ordinal++);
        out.push_back(make_sys_call("scopeBegin", id));
        out.push_back(std::move(st));
        out.push_back(make_sys_call("scopeEnd", id));
    }
    m.body = std::move(out);
}

inline void add_class_marker_method(ast::ClassDecl& c, const std::string& name,
                                    const std::string& fn, const std::string& payload) {
    ast::MethodDecl m;
    m.isStatic = true;
    m.returnType = "void";
    m.name = name;
    m.body.push_back(make_sys_call(fn, payload));
    c.methods.push_back(std::move(m));
    c.memberOrder.push_back(ast::MemberKind::Method);
}

inline void instrument_class(ast::ClassDecl& c, const std::string& fq,
                             const InstrumentPlan& plan) {
    auto clIt = plan.classLevel.find(fq);
    if (clIt == plan.classLevel.end()) {
        // production or helper class: entry log in every method
        for (auto& m : c.methods) prepend_emit(m, method_signature(fq, m));
    } else if (clIt->second.level == Level::Class) {
        // exactly two markers for the whole class, emitted by methods the
        // runner invokes before and after the class run
        for (auto& m : c.methods) {
            bool lifecycle = m.has_annotation("Test") || m.has_annotation("Before") ||
                             m.has_annotation("BeforeClass");
            if (!lifecycle) prepend_emit(m, method_signature(fq, m));
        }
        add_class_marker_method(c, kClassBeginMethod, "scopeBegin", "C=" + fq);
        add_class_marker_method(c, kClassEndMethod, "scopeEnd", "C=" + fq);
    } else {
        for (auto& m : c.methods) {
            std::string sig = method_signature(fq, m);
            if (m.has_annotation("Test")) {
                auto mlIt = plan.methodLevel.find(sig);
                Level lvl = mlIt == plan.methodLevel.end() ? Level::Method : mlIt->second;
                if (lvl == Level::Assertion)
                    wrap_statements(m, "S=" + sig);
                else
                    wrap_body(m, "M=" + sig);
            } else if (m.has_annotation("Before") || m.has_annotation("BeforeClass")) {
                // setup callees merge into every entity of the class
                wrap_body(m, "B=" + fq);
            } else {
                prepend_emit(m, sig);  // helpers and constructors
            }
        }
    }
    for (auto& n : c.nested) instrument_class(*n, fq + "." + n->name, plan);
}

}  // namespace detail

// Pure per-file rewriting: parse, insert logs/markers, pretty-print.
inline std::string instrument_file(const std::string& sourceText, const InstrumentPlan& plan) {
    ast::File f = parse_minij(sourceText);
    for (auto& c : f.classes) detail::instrument_class(*c, c->name, plan);
    return pretty_print(f);
}

// ---------------------------------------------------------------------------
// Instrumented copy + manifest

// Manifest row per file: path, canonical source checksum, plan signature.
// A file is re-instrumented iff either differs (or the file is new).
struct CopyManifest {
    std::map<std::string, std::pair<std::string, std::string>> rows;
};

inline std::string plan_signature_for_file(const SourceFile& sf, const InstrumentPlan& plan) {
    std::string dump;
    std::function<void(const ClassModel&)> walk = [&](const ClassModel& cm) {
        auto it = plan.classLevel.find(cm.fqName);
        if (it == plan.classLevel.end()) {
            dump += cm.fqName + "=P\n";
        } else {
            dump += cm.fqName + "=" + level_prefix(it->second.level) + "\n";
            if (it->second.level != Level::Class) {
                for (auto& m : cm.methods) {
                    auto ml = plan.methodLevel.find(m.signature);
                    if (ml != plan.methodLevel.end())
                        dump += m.signature + "=" + level_prefix(ml->second) + "\n";
                }
            }
        }
        for (auto& n : cm.nested) walk(n);
    };
    for (auto& c : sf.classes) walk(c);
    return sha256_hex(dump);
}

inline void save_manifest(const CopyManifest& m, const fs::path& instrDir) {
    std::vector<std::vector<std::string>> rows;
    for (auto& [path, v] : m.rows) rows.push_back({path, v.first, v.second});
    write_file_atomic(instrDir / "manifest.tsv", tsv_render(rows));
}

inline CopyManifest load_manifest(const fs::path& instrDir) {
    CopyManifest m;
    if (!fs::exists(instrDir / "manifest.tsv")) return m;
    for (auto& row : tsv_parse(read_file(instrDir / "manifest.tsv")))
        m.rows[row[0]] = {row[1], row[2]};
    return m;
}

// Re-instrument exactly the files whose canonical content or plan
// changed; remove files deleted from the project. Returns the rewritten
// relative paths, sorted.
inline std::vector<std::string> sync_instrumented_copy(const Project& p,
                                                       const TestInventory& inv,
                                                       const fs::path& instrDir,
                                                       bool forceMethodLevel = false) {
    if (!fs::exists(instrDir / "manifest.tsv"))
        throw StoreError("instrumented copy missing; initial run required");
    InstrumentPlan plan = build_instrument_plan(p, inv, forceMethodLevel);
    CopyManifest manifest = load_manifest(instrDir);
    std::vector<std::string> rewritten;

    std::set<std::string> live;
    for (auto& sf : p.files) {
        live.insert(sf.path);
        std::string fileSum = smart_checksum_file(*sf.fileAst);
        std::string planSig = plan_signature_for_file(sf, plan);
        auto it = manifest.rows.find(sf.path);
        if (it != manifest.rows.end() && it->second.first == fileSum &&
            it->second.second == planSig)
            continue;  // current: instrumenting again would be a no-op
        write_file_atomic(instrDir / sf.path, instrument_file(sf.text, plan));
        manifest.rows[sf.path] = {fileSum, planSig};
        rewritten.push_back(sf.path);
    }
    for (auto it = manifest.rows.begin(); it != manifest.rows.end();) {
        if (!live.count(it->first)) {
            fs::remove(instrDir / it->first);
            it = manifest.rows.erase(it);
        } else {
            ++it;
        }
    }
    save_manifest(manifest, instrDir);
    std::sort(rewritten.begin(), rewritten.end());
    return rewritten;
}

// From-scratch instrumentation of the whole tree.
inline std::vector<std::string> install_instrumented_copy(const Project& p,
                                                          const TestInventory& inv,
                                                          const fs::path& instrDir,
                                                          bool forceMethodLevel = false) {
    fs::remove_all(instrDir);
    fs::create_directories(instrDir);
    save_manifest(CopyManifest{}, instrDir);
    return sync_instrumented_copy(p, inv, instrDir, forceMethodLevel);
}

}  // namespace selertion
