#pragma once

// Change computation between two revisions by comparing smart checksums
// of source structures: class head (CH), other declarations (OT) and
// methods (M) per class. Checksums are taken over the canonical
// pretty-printed form, so comment and formatting edits never register.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selertion/frontend.hpp"
#include "selertion/printer.hpp"
#include "selertion/sha256.hpp"
#include "selertion/util.hpp"

namespace selertion {

inline constexpr const char* kStoreFormatVersion = "1";

struct StoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClassSums {
    std::string chSum;
    std::string otSum;
};

struct ChecksumStore {
    std::string revisionId;
    std::map<std::string, std::string> fileSums;   // path -> checksum
    std::map<std::string, ClassSums> classSums;    // fqName -> CH/OT sums
    std::map<std::string, std::map<std::string, std::string>> methodSums;  // fq -> sig -> sum
    std::map<std::string, std::string> classPath;  // fqName -> path (for delta partitioning)
};

enum class ClassChangeReason { Added, Deleted, HeadChanged, OtherChanged };
enum class MethodChangeReason { Added, Deleted, Changed, Lookup };

struct ClassChange {
    std::string fqName;
    ClassChangeReason reason;
    bool isTest = false;
};

struct MethodChange {
    std::string signature;
    MethodChangeReason reason;
    bool isTest = false;
};

struct ChangeSet {
    std::vector<ClassChange> classChanges;    // delta^c
    std::vector<MethodChange> methodChanges;  // delta^m

    bool empty() const { return classChanges.empty() && methodChanges.empty(); }

    bool has_class(const std::string& fq) const {
        for (auto& c : classChanges)
            if (c.fqName == fq) return true;
        return false;
    }
    bool has_method(const std::string& sig) const {
        for (auto& m : methodChanges)
            if (m.signature == sig) return true;
        return false;
    }
};

// --- smart checksums -------------------------------------------------------

inline std::string class_head_text(const ast::ClassDecl& c) {
    std::string t = c.isEnum ? "enum " : "class ";
    t += c.name;
    if (!c.superName.empty()) t += " extends " + c.superName;
    for (auto& a : c.annotations) {
        t += " @" + a.name;
        for (auto& [k, v] : a.params) t += " " + k + "=" + v;
    }
    return t;
}

inline std::string class_other_text(const ast::ClassDecl& c) {
    Printer pr;
    std::string t;
    if (!c.enumConsts.empty()) {
        for (auto& e : c.enumConsts) t += e + ";";
        t += "\n";
    }
    for (auto& f : c.fields) {
        // canonical field line via the printer
        std::string line;
        line += f.isStatic ? "static " : "";
        line += f.typeName + " " + f.name;
        if (f.init) line += " = " + pr.print_expr_text(*f.init);
        t += line + ";\n";
    }
    return t;
}

inline std::string smart_checksum_class_head(const ast::ClassDecl& c) {
    return sha256_hex(class_head_text(c));
}

inline std::string smart_checksum_class_other(const ast::ClassDecl& c) {
    return sha256_hex(class_other_text(c));
}

inline std::string smart_checksum_method(const ast::MethodDecl& m) {
    Printer pr;
    return sha256_hex(pr.print_method_text(m));
}

inline std::string smart_checksum_file(const ast::File& f) {
    return sha256_hex(pretty_print(f));
}

// --- store construction ----------------------------------------------------

namespace detail {

inline void add_class_sums(ChecksumStore& store, const ClassModel& cm, const std::string& path) {
    store.classSums[cm.fqName] = {smart_checksum_class_head(*cm.decl),
                                  smart_checksum_class_other(*cm.decl)};
    store.classPath[cm.fqName] = path;
    auto& sums = store.methodSums[cm.fqName];
    for (auto& m : cm.methods) sums[m.signature] = smart_checksum_method(*m.decl);
    for (auto& n : cm.nested) add_class_sums(store, n, path);
}

}  // namespace detail

inline std::string revision_id_of(const std::map<std::string, std::string>& fileSums) {
    Sha256 h;
    for (auto& [path, sum] : fileSums) {
        h.update(path);
        h.update("\t");
        h.update(sum);
        h.update("\n");
    }
    return h.hex_digest();
}

inline ChecksumStore compute_store(const Project& p) {
    ChecksumStore store;
    for (auto& f : p.files) {
        store.fileSums[f.path] = smart_checksum_file(*f.fileAst);
        for (auto& c : f.classes) detail::add_class_sums(store, c, f.path);
    }
    store.revisionId = revision_id_of(store.fileSums);
    return store;
}

// --- persistence (.selertion/checksums/) -----------------------------------

inline void save_checksum_store(const ChecksumStore& store, const fs::path& dir) {
    std::vector<std::vector<std::string>> files, classes, methods, paths, meta;
    for (auto& [p, s] : store.fileSums) files.push_back({p, s});
    for (auto& [fq, cs] : store.classSums) classes.push_back({fq, cs.chSum, cs.otSum});
    for (auto& [fq, ms] : store.methodSums)
        for (auto& [sig, s] : ms) methods.push_back({fq, sig, s});
    for (auto& [fq, p] : store.classPath) paths.push_back({fq, p});
    meta.push_back({"revisionId", store.revisionId});
    meta.push_back({"algorithm", kHashAlgorithm});
    meta.push_back({"formatVersion", kStoreFormatVersion});
    write_file_atomic(dir / "files.tsv", tsv_render(files));
    write_file_atomic(dir / "classes.tsv", tsv_render(classes));
    write_file_atomic(dir / "methods.tsv", tsv_render(methods));
    write_file_atomic(dir / "paths.tsv", tsv_render(paths));
    write_file_atomic(dir / "meta.tsv", tsv_render(meta));
}

inline std::optional<ChecksumStore> load_checksum_store(const fs::path& dir) {
    if (!fs::exists(dir / "meta.tsv")) return std::nullopt;
    ChecksumStore store;
    std::map<std::string, std::string> meta;
    for (auto& row : tsv_parse(read_file(dir / "meta.tsv"))) meta[row[0]] = row[1];
    if (meta["algorithm"] != kHashAlgorithm)
        throw StoreError("checksum store uses hash algorithm '" + meta["algorithm"] +
                         "', expected " + kHashAlgorithm);
    if (meta["formatVersion"] != kStoreFormatVersion)
        throw StoreError("checksum store format version mismatch");
    store.revisionId = meta["revisionId"];
    for (auto& row : tsv_parse(read_file(dir / "files.tsv"))) store.fileSums[row[0]] = row[1];
    for (auto& row : tsv_parse(read_file(dir / "classes.tsv")))
        store.classSums[row[0]] = {row[1], row[2]};
    for (auto& row : tsv_parse(read_file(dir / "methods.tsv")))
        store.methodSums[row[0]][row[1]] = row[2];
    for (auto& row : tsv_parse(read_file(dir / "paths.tsv"))) store.classPath[row[0]] = row[1];
    return store;
}

// --- lookup changes --------------------------------------------------------

// For an added or deleted override C.m, the inherited definition A.m it
// shadowed (or exposed) becomes a synthetic method-level change.
inline std::vector<std::string> compute_lookup_changes(
    const std::vector<std::string>& addedMethods, const std::vector<std::string>& deletedMethods,
    const Project& p) {
    std::set<std::string> out;
    auto consider = [&](const std::string& sig) {
        auto hash = sig.find('#');
        auto paren = sig.find('(');
        if (hash == std::string::npos || paren == std::string::npos) return;
        std::string cls = sig.substr(0, hash);
        std::string tail = sig.substr(hash + 1);  // name(types)
        const ClassModel* cm = p.find_class(cls);
        if (!cm || cm->superName.empty()) return;
        for (const ClassModel* a = p.find_class(cm->superName); a;
             a = a->superName.empty() ? nullptr : p.find_class(a->superName)) {
            for (auto& m : a->methods) {
                if (m.isConstructor) continue;
                if (m.signature == a->fqName + "#" + tail) {
                    out.insert(m.signature);
                    return;
                }
            }
        }
    };
    for (auto& s : addedMethods) consider(s);
    for (auto& s : deletedMethods) consider(s);
    return {out.begin(), out.end()};
}

// --- Algorithm 1 -----------------------------------------------------------

// Initial-run rule: with no prior store, every class is a new class with
// a class-level change.
inline ChangeSet initial_changes(const Project& p) {
    ChangeSet delta;
    ChecksumStore now = compute_store(p);
    for (auto& [fq, _] : now.classSums)
        delta.classChanges.push_back({fq, ClassChangeReason::Added, is_test_path(now.classPath[fq])});
    return delta;
}

inline ChangeSet compute_changes(const ChecksumStore& old, const Project& newRev) {
    ChecksumStore now = compute_store(newRev);
    ChangeSet delta;

    // file-level diff gates which classes get examined at all
    std::set<std::string> changedFiles, addedFiles, deletedFiles;
    for (auto& [path, sum] : now.fileSums) {
        auto it = old.fileSums.find(path);
        if (it == old.fileSums.end())
            addedFiles.insert(path);
        else if (it->second != sum)
            changedFiles.insert(path);
    }
    for (auto& [path, _] : old.fileSums)
        if (!now.fileSums.count(path)) deletedFiles.insert(path);

    auto file_touched = [&](const std::string& path) {
        return changedFiles.count(path) || addedFiles.count(path) || deletedFiles.count(path);
    };

    std::vector<std::string> addedMethods, deletedMethods;

    // added and changed classes, walking the new revision
    for (auto& [fq, sums] : now.classSums) {
        const std::string& path = now.classPath[fq];
        bool isTest = is_test_path(path);
        auto oldIt = old.classSums.find(fq);
        // a class in a brand-new file is an added class, even if the same
        // name previously lived elsewhere (moves are delete+add)
        if (oldIt == old.classSums.end() ||
            (addedFiles.count(path) &&
             (!old.classPath.count(fq) || old.classPath.at(fq) != path))) {
            delta.classChanges.push_back({fq, ClassChangeReason::Added, isTest});
            continue;
        }
        if (!file_touched(path)) continue;
        if (oldIt->second.chSum != sums.chSum) {
            delta.classChanges.push_back({fq, ClassChangeReason::HeadChanged, isTest});
            continue;
        }
        if (oldIt->second.otSum != sums.otSum) {
            delta.classChanges.push_back({fq, ClassChangeReason::OtherChanged, isTest});
            continue;
        }
        // method-level diff
        static const std::map<std::string, std::string> kNoMethods;
        const auto& oldMs = old.methodSums.count(fq) ? old.methodSums.at(fq) : kNoMethods;
        const auto& newMs = now.methodSums.at(fq);
        for (auto& [sig, sum] : newMs) {
            auto mi = oldMs.find(sig);
            if (mi == oldMs.end()) {
                delta.methodChanges.push_back({sig, MethodChangeReason::Added, isTest});
                addedMethods.push_back(sig);
            } else if (mi->second != sum) {
                delta.methodChanges.push_back({sig, MethodChangeReason::Changed, isTest});
            }
        }
        for (auto& [sig, _] : oldMs) {
            if (!newMs.count(sig)) {
                delta.methodChanges.push_back({sig, MethodChangeReason::Deleted, isTest});
                deletedMethods.push_back(sig);
            }
        }
    }

    // deleted classes
    for (auto& [fq, _] : old.classSums) {
        if (!now.classSums.count(fq)) {
            std::string path = old.classPath.count(fq) ? old.classPath.at(fq) : "";
            delta.classChanges.push_back({fq, ClassChangeReason::Deleted, is_test_path(path)});
        }
    }

    // lookup changes; skip targets already covered by a class-level change
    for (auto& sig : compute_lookup_changes(addedMethods, deletedMethods, newRev)) {
        std::string cls = sig.substr(0, sig.find('#'));
        if (delta.has_class(cls) || delta.has_method(sig)) continue;
        bool isTest = now.classPath.count(cls) && is_test_path(now.classPath.at(cls));
        delta.methodChanges.push_back({sig, MethodChangeReason::Lookup, isTest});
    }

    return delta;
}

}  // namespace selertion
