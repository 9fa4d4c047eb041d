#pragma once

// Source modeling: parse MiniJ files into class models (class head /
// other declarations / methods), extract per-statement def-use facts,
// and build the test inventory used for selectability classification.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selertion/parser.hpp"
#include "selertion/printer.hpp"
#include "selertion/sha256.hpp"
#include "selertion/util.hpp"

namespace selertion {

struct LinkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StmtKind { VarDecl, Assign, Invocation, Assertion, Return, If, While, For };

inline StmtKind stmt_kind(const ast::Stmt& st) {
    using Tag = ast::Stmt::Tag;
    switch (st.tag) {
        case Tag::VarDecl: return StmtKind::VarDecl;
        case Tag::Assign: return StmtKind::Assign;
        case Tag::ExprStmt: return StmtKind::Invocation;
        case Tag::Assert: return StmtKind::Assertion;
        case Tag::Return: return StmtKind::Return;
        case Tag::If: return StmtKind::If;
        case Tag::While: return StmtKind::While;
        case Tag::For: return StmtKind::For;
    }
    return StmtKind::Invocation;
}

// Per-statement dependence facts for one top-level statement of a method.
struct StatementInfo {
    int ordinal = 0;
    StmtKind kind = StmtKind::Invocation;
    std::set<std::string> defs;
    std::set<std::string> uses;
    // variables whose object state a call in this statement may mutate
    // (receivers and arguments); empty for assertion statements
    std::set<std::string> mutates;
    // variables tied together by passing one into a call/constructor of
    // another, including the assigned result
    std::vector<std::set<std::string>> aliasGroups;
    bool isAssert = false;
    std::string assertName;
    // true when the statement calls outside the analyzable scope
    // (sys.sleep) or writes a static/instance field
    bool outOfScope = false;
    std::string contentHash;
    const ast::Stmt* node = nullptr;
};

struct MethodModel {
    std::string signature;  // Class#name(type,...)
    std::string name;
    std::string declaringClass;
    const ast::MethodDecl* decl = nullptr;
    bool isTest = false, isBefore = false, isBeforeClass = false;
    bool isHelper = false, isConstructor = false, isStatic = false;
    std::string expectsException;
    bool hasConditionals = false;
    int assertionCount = 0;
    std::vector<StatementInfo> statements;
};

struct ClassModel {
    std::string fqName;
    bool isEnum = false;
    std::string superName;
    const ast::ClassDecl* decl = nullptr;
    std::vector<MethodModel> methods;
    std::vector<ClassModel> nested;
    size_t otherCount = 0;  // fields + enum-constant groups
};

struct SourceFile {
    std::string path;
    std::string text;
    std::shared_ptr<ast::File> fileAst;
    std::vector<ClassModel> classes;
};

inline std::string method_signature(const std::string& classFq, const ast::MethodDecl& m) {
    std::string sig = classFq + "#" + m.name + "(";
    for (size_t i = 0; i < m.params.size(); ++i) {
        if (i) sig += ",";
        sig += m.params[i].typeName;
    }
    sig += ")";
    return sig;
}

namespace detail {

inline void walk_exprs(const ast::Expr& e, const std::function<void(const ast::Expr&)>& fn) {
    fn(e);
    if (e.lhs) walk_exprs(*e.lhs, fn);
    if (e.rhs) walk_exprs(*e.rhs, fn);
    for (auto& a : e.args) walk_exprs(*a, fn);
}

inline void walk_stmt_exprs(const ast::Stmt& st,
                            const std::function<void(const ast::Expr&)>& fn) {
    if (st.target) walk_exprs(*st.target, fn);
    if (st.expr) walk_exprs(*st.expr, fn);
    if (st.cond) walk_exprs(*st.cond, fn);
    for (auto& a : st.args) walk_exprs(*a, fn);
    if (st.init) walk_stmt_exprs(*st.init, fn);
    if (st.update) walk_stmt_exprs(*st.update, fn);
    for (auto& s : st.body) walk_stmt_exprs(*s, fn);
    for (auto& s : st.elseBody) walk_stmt_exprs(*s, fn);
}

inline bool contains_conditional(const std::vector<ast::StmtPtr>& body) {
    for (auto& st : body) {
        switch (st->tag) {
            case ast::Stmt::Tag::If:
            case ast::Stmt::Tag::While:
            case ast::Stmt::Tag::For: return true;
            default: break;
        }
    }
    return false;
}

inline int count_assertions(const std::vector<ast::StmtPtr>& body) {
    int n = 0;
    for (auto& st : body) {
        if (st->tag == ast::Stmt::Tag::Assert) ++n;
        n += count_assertions(st->body);
        n += count_assertions(st->elseBody);
    }
    return n;
}

// Local variables mentioned anywhere inside an expression.
inline void collect_local_names(const ast::Expr& e, const std::set<std::string>& locals,
                                std::set<std::string>& out) {
    walk_exprs(e, [&](const ast::Expr& n) {
        if (n.tag == ast::Expr::Tag::Name && locals.count(n.text)) out.insert(n.text);
    });
}

}  // namespace detail

// Def/use and conservative alias facts for the top-level statements of a
// method body. `locals` accumulates parameters plus declared variables.
inline StatementInfo analyze_statement(const ast::Stmt& st, int ordinal,
                                       std::set<std::string>& locals) {
    StatementInfo info;
    info.ordinal = ordinal;
    info.kind = stmt_kind(st);
    info.node = &st;
    info.isAssert = st.tag == ast::Stmt::Tag::Assert;
    if (info.isAssert) info.assertName = st.name;

    Printer pr;
    info.contentHash = sha256_hex(pr.print_stmt_text(st));

    // uses: every local variable mentioned in the statement's expressions
    detail::walk_stmt_exprs(st, [&](const ast::Expr& e) {
        if (e.tag == ast::Expr::Tag::Name && locals.count(e.text)) info.uses.insert(e.text);
    });

    // defs and side-effect classification
    if (st.tag == ast::Stmt::Tag::VarDecl) {
        locals.insert(st.name);
        info.defs.insert(st.name);
        info.uses.erase(st.name);
    } else if (st.tag == ast::Stmt::Tag::Assign) {
        if (st.target->tag == ast::Expr::Tag::Name) {
            if (locals.count(st.target->text)) {
                info.defs.insert(st.target->text);
            } else {
                // bare write to an instance/static field: outside local data flow
                info.outOfScope = true;
            }
        } else {  // FieldAccess target
            const ast::Expr& base = *st.target->lhs;
            if (base.tag == ast::Expr::Tag::Name && locals.count(base.text)) {
                info.defs.insert(base.text);  // mutates the object held by the local
            } else {
                info.outOfScope = true;  // static or foreign-scope field write
            }
        }
    }

    // calls: mutation and alias facts ("method calls will change the
    // states of the caller object and objects passed as arguments");
    // assertion statements observe, they are not mutation sources
    detail::walk_stmt_exprs(st, [&](const ast::Expr& e) {
        if (e.tag == ast::Expr::Tag::Call) {
            if (e.lhs && e.lhs->tag == ast::Expr::Tag::Name && e.lhs->text == "sys")
                info.outOfScope = true;  // third-party-style builtin, not sliceable
        }
        if (e.tag != ast::Expr::Tag::Call && e.tag != ast::Expr::Tag::New) return;
        if (info.isAssert) return;
        if (e.tag == ast::Expr::Tag::Call && !e.lhs && e.text == "print")
            return;  // builtin output, observes only
        std::set<std::string> group;
        if (e.lhs) detail::collect_local_names(*e.lhs, locals, group);
        for (auto& a : e.args) detail::collect_local_names(*a, locals, group);
        for (auto& v : group) info.mutates.insert(v);
        for (auto& d : info.defs) group.insert(d);
        if (group.size() > 1) info.aliasGroups.push_back(std::move(group));
    });

    return info;
}

inline MethodModel build_method_model(const std::string& classFq, const ast::MethodDecl& m) {
    MethodModel mm;
    mm.decl = &m;
    mm.name = m.name;
    mm.declaringClass = classFq;
    mm.signature = method_signature(classFq, m);
    mm.isConstructor = m.isCtor;
    mm.isStatic = m.isStatic;
    mm.isTest = m.has_annotation("Test");
    mm.isBefore = m.has_annotation("Before");
    mm.isBeforeClass = m.has_annotation("BeforeClass");
    mm.isHelper = !mm.isTest && !mm.isBefore && !mm.isBeforeClass && !mm.isConstructor;
    mm.expectsException = m.annotation_value("Test", "expected");
    mm.hasConditionals = detail::contains_conditional(m.body);
    mm.assertionCount = detail::count_assertions(m.body);

    std::set<std::string> locals;
    for (auto& p : m.params) locals.insert(p.name);
    int ordinal = 0;
    for (auto& st : m.body) mm.statements.push_back(analyze_statement(*st, ordinal++, locals));
    return mm;
}

// Partitions a class declaration into class head, other declarations,
// methods (constructors included) and nested classes.
inline ClassModel build_class_model(const ast::ClassDecl& cls, const std::string& outerFq = "") {
    ClassModel cm;
    cm.fqName = outerFq.empty() ? cls.name : outerFq + "." + cls.name;
    cm.isEnum = cls.isEnum;
    cm.superName = cls.superName;
    cm.decl = &cls;
    cm.otherCount = cls.fields.size();
    for (ast::MemberKind k : cls.memberOrder)
        if (k == ast::MemberKind::EnumConsts) ++cm.otherCount;
    std::set<std::string> sigs;
    for (auto& m : cls.methods) {
        auto mm = build_method_model(cm.fqName, m);
        if (!sigs.insert(mm.signature).second)
            throw ParseError("duplicate method signature " + mm.signature, m.line, 1);
        cm.methods.push_back(std::move(mm));
    }
    for (auto& n : cls.nested) cm.nested.push_back(build_class_model(*n, cm.fqName));
    return cm;
}

inline SourceFile parse_source(const std::string& text, const std::string& path) {
    SourceFile sf;
    sf.path = path;
    sf.text = text;
    sf.fileAst = std::make_shared<ast::File>(parse_minij(text));
    for (auto& c : sf.fileAst->classes) sf.classes.push_back(build_class_model(*c));
    return sf;
}

// ---------------------------------------------------------------------------
// Project: all source files of one revision, with a flat class index.

struct Project {
    fs::path root;
    std::vector<SourceFile> files;

    std::map<std::string, const ClassModel*> classIndex;
    std::map<std::string, std::string> fileOf;  // class fqName -> relative path

    const ClassModel* find_class(const std::string& fq) const {
        auto it = classIndex.find(fq);
        return it == classIndex.end() ? nullptr : it->second;
    }

    const MethodModel* find_method(const std::string& signature) const {
        auto hash = signature.find('#');
        if (hash == std::string::npos) return nullptr;
        const ClassModel* cm = find_class(signature.substr(0, hash));
        if (!cm) return nullptr;
        for (auto& m : cm->methods)
            if (m.signature == signature) return &m;
        return nullptr;
    }

    // Dynamic-dispatch aware: walks the superclass chain.
    const MethodModel* resolve_method(const std::string& classFq, const std::string& name,
                                      size_t argc) const {
        for (const ClassModel* cm = find_class(classFq); cm;
             cm = cm->superName.empty() ? nullptr : find_class(cm->superName)) {
            for (auto& m : cm->methods)
                if (m.name == name && m.decl->params.size() == argc && !m.isConstructor)
                    return &m;
        }
        return nullptr;
    }

    bool is_test_class_path(const std::string& fq) const {
        auto it = fileOf.find(fq);
        return it != fileOf.end() && is_test_path(it->second);
    }

    void index() {
        classIndex.clear();
        fileOf.clear();
        std::function<void(const ClassModel&, const std::string&)> add =
            [&](const ClassModel& cm, const std::string& path) {
                if (classIndex.count(cm.fqName))
                    throw LinkError("duplicate class " + cm.fqName + " across project");
                classIndex[cm.fqName] = &cm;
                fileOf[cm.fqName] = path;
                for (auto& n : cm.nested) add(n, path);
            };
        for (auto& f : files)
            for (auto& c : f.classes) add(c, f.path);
    }

    // Superclass references must resolve somewhere in the project.
    void link() const {
        for (auto& [fq, cm] : classIndex) {
            if (!cm->superName.empty() && !classIndex.count(cm->superName))
                throw LinkError("unresolvable superclass " + cm->superName + " of " + fq);
        }
    }

    bool derives_from(const std::string& sub, const std::string& super) const {
        for (const ClassModel* cm = find_class(sub); cm;
             cm = cm->superName.empty() ? nullptr : find_class(cm->superName)) {
            if (cm->fqName == super) return true;
        }
        return false;
    }
};

inline Project load_project(const fs::path& root) {
    Project p;
    p.root = root;
    for (auto& rel : list_source_files(root))
        p.files.push_back(parse_source(read_file(root / rel), rel));
    p.index();
    return p;
}

// ---------------------------------------------------------------------------
// Test inventory

struct TestMethodInfo {
    std::string signature;
    std::string name;
    std::string declaringClass;
    std::string expectsException;  // empty when none
    bool hasConditionals = false;
    int assertionCount = 0;
};

struct TestClassInfo {
    std::string fqName;
    bool parameterized = false;
    bool usesInheritance = false;
    bool callsOtherTests = false;
    std::vector<TestMethodInfo> testMethods;  // declared in this class only
};

struct TestInventory {
    std::vector<TestClassInfo> testClasses;

    const TestClassInfo* find_class(const std::string& fq) const {
        for (auto& c : testClasses)
            if (c.fqName == fq) return &c;
        return nullptr;
    }

    const TestMethodInfo* find_method(const std::string& signature) const {
        for (auto& c : testClasses)
            for (auto& m : c.testMethods)
                if (m.signature == signature) return &m;
        return nullptr;
    }
};

namespace detail {

// Does any statement of `mm` contain a bare call to a @Test method of
// `cls` or its ancestors?
inline bool calls_other_tests(const Project& p, const ClassModel& cls, const MethodModel& mm) {
    bool found = false;
    for (auto& st : mm.decl->body) {
        walk_stmt_exprs(*st, [&](const ast::Expr& e) {
            if (e.tag != ast::Expr::Tag::Call || e.lhs) return;
            const MethodModel* callee = p.resolve_method(cls.fqName, e.text, e.args.size());
            if (callee && callee->isTest) found = true;
        });
    }
    return found;
}

}  // namespace detail

inline TestInventory enumerate_tests(const Project& p) {
    p.link();
    TestInventory inv;
    // classes that declare or inherit at least one @Test method
    auto has_tests = [&](const ClassModel& cm) {
        for (const ClassModel* c = &cm; c;
             c = c->superName.empty() ? nullptr : p.find_class(c->superName)) {
            for (auto& m : c->methods)
                if (m.isTest) return true;
        }
        return false;
    };

    std::set<std::string> testClassNames;
    std::function<void(const ClassModel&)> scan = [&](const ClassModel& cm) {
        if (p.is_test_class_path(cm.fqName) && has_tests(cm)) testClassNames.insert(cm.fqName);
        for (auto& n : cm.nested) scan(n);
    };
    for (auto& f : p.files)
        for (auto& c : f.classes) scan(c);

    for (auto& fq : testClassNames) {
        const ClassModel& cm = *p.find_class(fq);
        TestClassInfo info;
        info.fqName = fq;
        info.parameterized = cm.decl->has_annotation("Parameterized");
        // inheritance flag covers both directions of a test-class chain
        if (!cm.superName.empty() && testClassNames.count(cm.superName))
            info.usesInheritance = true;
        for (auto& other : testClassNames) {
            if (other != fq && p.derives_from(other, fq)) info.usesInheritance = true;
        }
        for (auto& mm : cm.methods) {
            if (mm.isTest) {
                TestMethodInfo tmi;
                tmi.signature = mm.signature;
                tmi.name = mm.name;
                tmi.declaringClass = fq;
                tmi.expectsException = mm.expectsException;
                tmi.hasConditionals = mm.hasConditionals;
                tmi.assertionCount = mm.assertionCount;
                info.testMethods.push_back(std::move(tmi));
            }
            if (detail::calls_other_tests(p, cm, mm) && mm.isTest)
                info.callsOtherTests = true;
        }
        inv.testClasses.push_back(std::move(info));
    }
    return inv;
}

}  // namespace selertion
