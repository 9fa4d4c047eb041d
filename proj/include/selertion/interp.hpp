#pragma once

// Deterministic tree-walking executor for MiniJ. Dispatch is dynamic by
// the receiver's concrete class walking up the superclass chain.
// sys.sleep is a no-op marker; the sys.emit / sys.scopeBegin /
// sys.scopeEnd intrinsics feed the trace channel used by dependency
// collection on the instrumented copy.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "selertion/frontend.hpp"

namespace selertion {

struct Object;
using ObjPtr = std::shared_ptr<Object>;
struct Value;
using ListPtr = std::shared_ptr<std::vector<Value>>;

struct Value {
    std::variant<std::monostate, long long, double, bool, std::string, ObjPtr, ListPtr> v;

    Value() = default;
    Value(long long i) : v(i) {}
    Value(double d) : v(d) {}
    Value(bool b) : v(b) {}
    Value(std::string s) : v(std::move(s)) {}
    Value(ObjPtr o) : v(std::move(o)) {}
    Value(ListPtr l) : v(std::move(l)) {}

    bool is_null() const {
        return std::holds_alternative<std::monostate>(v) ||
               (std::holds_alternative<ObjPtr>(v) && !std::get<ObjPtr>(v));
    }
};

struct Object {
    const ClassModel* cls = nullptr;
    std::map<std::string, Value> fields;
    std::string enumConst;  // set for enum constants
};

// user-level exception raised by throw(Name) or @Test(expected=...) flows
struct MjThrow {
    std::string name;
};

// runtime errors: division by zero, null receiver, unknown method, ...
struct MjError {
    std::string message;
};

struct AssertFail {
    std::string message;
    int line = 0;
};

using TraceSink = std::function<void(const std::string& kind, const std::string& payload)>;

class Interpreter {
public:
    explicit Interpreter(const Project& project) : project_(&project) { project.link(); }

    void set_trace_sink(TraceSink sink) { traceSink_ = std::move(sink); }

    // called on every method invocation; used by exhaustive-trace oracles
    void set_call_hook(std::function<void(const MethodModel&)> hook) {
        callHook_ = std::move(hook);
    }

    long long assertions_evaluated() const { return assertionsEvaluated_; }
    const std::string& output() const { return output_; }

    const Project& project() const { return *project_; }

    // ---- entry points -----------------------------------------------------

    ObjPtr instantiate(const std::string& classFq, std::vector<Value> args) {
        const ClassModel* cls = project_->find_class(classFq);
        if (!cls) throw MjError("unknown class " + classFq);
        auto obj = std::make_shared<Object>();
        obj->cls = cls;
        init_instance_fields(obj, cls);
        const MethodModel* ctor = find_ctor(cls, args.size());
        if (ctor) {
            invoke(*ctor, obj, std::move(args));
        } else if (!args.empty()) {
            throw MjError("no constructor with " + std::to_string(args.size()) +
                          " arguments in " + classFq);
        }
        return obj;
    }

    Value invoke(const MethodModel& m, ObjPtr self, std::vector<Value> args) {
        if (callHook_) callHook_(m);
        if (args.size() != m.decl->params.size())
            throw MjError("argument count mismatch calling " + m.signature);
        // fresh step budget per top-level invocation so one runaway
        // method cannot starve later ones
        if (depth_ == 0) steps_ = 0;
        ++depth_;
        struct DepthGuard {
            long long& d;
            ~DepthGuard() { --d; }
        } guard{depth_};
        Env env;
        env.self = std::move(self);
        env.contextClass = project_->find_class(m.declaringClass);
        for (size_t i = 0; i < args.size(); ++i)
            env.locals[m.decl->params[i].name] = std::move(args[i]);
        exec_block(m.decl->body, env);
        return env.returnValue;
    }

    Value invoke_by_name(const std::string& classFq, const std::string& name, ObjPtr self,
                         std::vector<Value> args) {
        const MethodModel* m = project_->resolve_method(classFq, name, args.size());
        if (!m) throw MjError("unknown method " + name + " on " + classFq);
        return invoke(*m, std::move(self), std::move(args));
    }

    Value static_field(const std::string& classFq, const std::string& name) {
        ensure_statics(classFq);
        auto cit = statics_.find(classFq);
        if (cit != statics_.end()) {
            auto fit = cit->second.find(name);
            if (fit != cit->second.end()) return fit->second;
        }
        // inherited static
        const ClassModel* cm = project_->find_class(classFq);
        if (cm && !cm->superName.empty()) return static_field(cm->superName, name);
        throw MjError("unknown static field " + classFq + "." + name);
    }

    void reset_statics() {
        statics_.clear();
        staticsReady_.clear();
    }

private:
    struct Env {
        std::map<std::string, Value> locals;
        ObjPtr self;
        const ClassModel* contextClass = nullptr;
        Value returnValue;
        bool returned = false;
    };

    // ---- helpers ----------------------------------------------------------

    const MethodModel* find_ctor(const ClassModel* cls, size_t argc) const {
        for (auto& m : cls->methods)
            if (m.isConstructor && m.decl->params.size() == argc) return &m;
        return nullptr;
    }

    void init_instance_fields(const ObjPtr& obj, const ClassModel* cls) {
        if (!cls) return;
        if (!cls->superName.empty()) init_instance_fields(obj, project_->find_class(cls->superName));
        Env env;
        env.self = obj;
        env.contextClass = cls;
        for (auto& f : cls->decl->fields) {
            if (f.isStatic) continue;
            obj->fields[f.name] = f.init ? eval(*f.init, env) : default_value(f.typeName);
        }
    }

    static Value default_value(const std::string& type) {
        if (type == "int") return Value((long long)0);
        if (type == "float") return Value(0.0);
        if (type == "bool") return Value(false);
        if (type == "string") return Value(std::string());
        return Value();  // null reference
    }

    void ensure_statics(const std::string& classFq) {
        if (staticsReady_.count(classFq)) return;
        const ClassModel* cls = project_->find_class(classFq);
        if (!cls) throw MjError("unknown class " + classFq);
        staticsReady_.insert(classFq);  // before init so self-references see defaults
        auto& slot = statics_[classFq];
        if (cls->isEnum) {
            for (auto& name : cls->decl->enumConsts) {
                auto obj = std::make_shared<Object>();
                obj->cls = cls;
                obj->enumConst = name;
                slot[name] = Value(obj);
            }
        }
        Env env;
        env.contextClass = cls;
        for (auto& f : cls->decl->fields) {
            if (!f.isStatic) continue;
            slot[f.name] = f.init ? eval(*f.init, env) : default_value(f.typeName);
        }
    }

    bool is_class_name(const std::string& name) const {
        return project_->find_class(name) != nullptr;
    }

    // ---- statements -------------------------------------------------------

    void exec_block(const std::vector<ast::StmtPtr>& body, Env& env) {
        for (auto& st : body) {
            exec_stmt(*st, env);
            if (env.returned) return;
        }
    }

    void exec_stmt(const ast::Stmt& st, Env& env) {
        // mutated revisions can loop forever (e.g. a deleted loop
        // increment); bounded execution turns that into a test error
        if (++steps_ > stepLimit_) throw MjError("execution step limit exceeded");
        using Tag = ast::Stmt::Tag;
        switch (st.tag) {
            case Tag::VarDecl:
                env.locals[st.name] =
                    st.expr ? eval(*st.expr, env) : default_value(st.typeName);
                break;
            case Tag::Assign: {
                Value val = eval(*st.expr, env);
                assign_target(*st.target, std::move(val), env);
                break;
            }
            case Tag::ExprStmt:
                eval(*st.expr, env);
                break;
            case Tag::Assert:
                exec_assert(st, env);
                break;
            case Tag::Return:
                if (st.expr) env.returnValue = eval(*st.expr, env);
                env.returned = true;
                break;
            case Tag::If:
                if (truthy(eval(*st.cond, env))) {
                    exec_block(st.body, env);
                } else {
                    exec_block(st.elseBody, env);
                }
                break;
            case Tag::While:
                while (truthy(eval(*st.cond, env))) {
                    exec_block(st.body, env);
                    if (env.returned) return;
                }
                break;
            case Tag::For:
                exec_stmt(*st.init, env);
                while (truthy(eval(*st.cond, env))) {
                    exec_block(st.body, env);
                    if (env.returned) return;
                    exec_stmt(*st.update, env);
                }
                break;
        }
    }

    void assign_target(const ast::Expr& target, Value val, Env& env) {
        if (target.tag == ast::Expr::Tag::Name) {
            auto it = env.locals.find(target.text);
            if (it != env.locals.end()) {
                it->second = std::move(val);
                return;
            }
            if (env.self && env.self->fields.count(target.text)) {
                env.self->fields[target.text] = std::move(val);
                return;
            }
            // static field of the enclosing class chain
            for (const ClassModel* c = env.contextClass; c;
                 c = c->superName.empty() ? nullptr : project_->find_class(c->superName)) {
                ensure_statics(c->fqName);
                auto& slot = statics_[c->fqName];
                if (slot.count(target.text)) {
                    slot[target.text] = std::move(val);
                    return;
                }
            }
            throw MjError("assignment to unknown variable " + target.text);
        }
        // field assignment: base.field = val
        const ast::Expr& base = *target.lhs;
        if (base.tag == ast::Expr::Tag::Name && !is_local_or_field(base.text, env) &&
            is_class_name(base.text)) {
            ensure_statics(base.text);
            auto& slot = statics_[base.text];
            if (!slot.count(target.text))
                throw MjError("unknown static field " + base.text + "." + target.text);
            slot[target.text] = std::move(val);
            return;
        }
        Value baseVal = eval(base, env);
        if (!std::holds_alternative<ObjPtr>(baseVal.v) || !std::get<ObjPtr>(baseVal.v))
            throw MjError("field assignment on null or non-object");
        std::get<ObjPtr>(baseVal.v)->fields[target.text] = std::move(val);
    }

    bool is_local_or_field(const std::string& name, const Env& env) const {
        if (env.locals.count(name)) return true;
        return env.self && env.self->fields.count(name);
    }

    void exec_assert(const ast::Stmt& st, Env& env) {
        ++assertionsEvaluated_;
        if (st.name == "assertTrue") {
            if (st.args.size() != 1) throw MjError("assertTrue expects 1 argument");
            if (!truthy(eval(*st.args[0], env)))
                throw AssertFail{"assertTrue failed", st.line};
            return;
        }
        if (st.name == "assertEq") {
            if (st.args.size() != 2) throw MjError("assertEq expects 2 arguments");
            Value a = eval(*st.args[0], env);
            Value b = eval(*st.args[1], env);
            if (!values_equal(a, b))
                throw AssertFail{"assertEq failed: " + stringify(a) + " != " + stringify(b),
                                 st.line};
            return;
        }
        // assertNear(a, b, tol): absolute difference
        if (st.args.size() != 3) throw MjError("assertNear expects 3 arguments");
        double a = as_float(eval(*st.args[0], env), "assertNear");
        double b = as_float(eval(*st.args[1], env), "assertNear");
        double tol = as_float(eval(*st.args[2], env), "assertNear");
        if (!(std::fabs(a - b) <= tol))
            throw AssertFail{"assertNear failed: |" + std::to_string(a) + " - " +
                                 std::to_string(b) + "| > " + std::to_string(tol),
                             st.line};
    }

    // ---- expressions ------------------------------------------------------

    Value eval(const ast::Expr& e, Env& env) {
        using Tag = ast::Expr::Tag;
        switch (e.tag) {
            case Tag::IntLit: return Value(e.intVal);
            case Tag::FloatLit: return Value(e.floatVal);
            case Tag::StringLit: return Value(e.text);
            case Tag::BoolLit: return Value(e.boolVal);
            case Tag::NullLit: return Value();
            case Tag::Name: return eval_name(e.text, env);
            case Tag::New: {
                std::vector<Value> args;
                for (auto& a : e.args) args.push_back(eval(*a, env));
                return Value(instantiate(e.text, std::move(args)));
            }
            case Tag::Call: return eval_call(e, env);
            case Tag::FieldAccess: return eval_field_access(e, env);
            case Tag::Throw: throw MjThrow{e.text};
            case Tag::Unary: {
                Value v = eval(*e.lhs, env);
                if (e.text == "!") return Value(!truthy(v));
                if (std::holds_alternative<long long>(v.v))
                    return Value(-std::get<long long>(v.v));
                if (std::holds_alternative<double>(v.v)) return Value(-std::get<double>(v.v));
                throw MjError("unary '-' on non-number");
            }
            case Tag::Binary: return eval_binary(e, env);
            case Tag::ListLit:
            case Tag::TupleLit: {
                auto list = std::make_shared<std::vector<Value>>();
                for (auto& a : e.args) list->push_back(eval(*a, env));
                return Value(list);
            }
        }
        throw MjError("unhandled expression");
    }

    Value eval_name(const std::string& name, Env& env) {
        auto it = env.locals.find(name);
        if (it != env.locals.end()) return it->second;
        if (env.self) {
            auto fit = env.self->fields.find(name);
            if (fit != env.self->fields.end()) return fit->second;
        }
        for (const ClassModel* c = env.contextClass; c;
             c = c->superName.empty() ? nullptr : project_->find_class(c->superName)) {
            ensure_statics(c->fqName);
            auto& slot = statics_[c->fqName];
            auto sit = slot.find(name);
            if (sit != slot.end()) return sit->second;
        }
        throw MjError("unknown variable " + name);
    }

    Value eval_call(const ast::Expr& e, Env& env) {
        // bare calls: print or a method of the current class
        if (!e.lhs) {
            if (e.text == "print") {
                std::string line;
                for (size_t i = 0; i < e.args.size(); ++i) {
                    if (i) line += " ";
                    line += stringify(eval(*e.args[i], env));
                }
                output_ += line + "\n";
                return Value();
            }
            std::vector<Value> args;
            for (auto& a : e.args) args.push_back(eval(*a, env));
            const std::string& cls =
                env.self ? env.self->cls->fqName
                         : (env.contextClass ? env.contextClass->fqName : "");
            return invoke_by_name(cls, e.text, env.self, std::move(args));
        }
        // sys intrinsics
        if (e.lhs->tag == ast::Expr::Tag::Name && e.lhs->text == "sys" &&
            !is_local_or_field("sys", env) && !is_class_name("sys")) {
            return eval_sys_call(e, env);
        }
        // static call: ClassName.method(...)
        if (e.lhs->tag == ast::Expr::Tag::Name && !is_local_or_field(e.lhs->text, env) &&
            is_class_name(e.lhs->text)) {
            std::vector<Value> args;
            for (auto& a : e.args) args.push_back(eval(*a, env));
            return invoke_by_name(e.lhs->text, e.text, nullptr, std::move(args));
        }
        Value recv = eval(*e.lhs, env);
        if (!std::holds_alternative<ObjPtr>(recv.v) || !std::get<ObjPtr>(recv.v))
            throw MjError("method call '" + e.text + "' on null or non-object receiver");
        ObjPtr obj = std::get<ObjPtr>(recv.v);
        std::vector<Value> args;
        for (auto& a : e.args) args.push_back(eval(*a, env));
        return invoke_by_name(obj->cls->fqName, e.text, obj, std::move(args));
    }

    Value eval_sys_call(const ast::Expr& e, Env& env) {
        if (e.text == "sleep") {
            if (!e.args.empty()) eval(*e.args[0], env);
            return Value();  // deterministic no-op marker for out-of-scope calls
        }
        if (e.text == "emit" || e.text == "scopeBegin" || e.text == "scopeEnd") {
            if (e.args.size() != 1) throw MjError("sys." + e.text + " expects 1 argument");
            Value payload = eval(*e.args[0], env);
            if (traceSink_) {
                const char* kind = e.text == "emit" ? "emit"
                                   : e.text == "scopeBegin" ? "begin"
                                                            : "end";
                traceSink_(kind, std::get<std::string>(payload.v));
            }
            return Value();
        }
        throw MjError("unknown sys builtin sys." + e.text);
    }

    Value eval_field_access(const ast::Expr& e, Env& env) {
        if (e.lhs->tag == ast::Expr::Tag::Name && !is_local_or_field(e.lhs->text, env) &&
            is_class_name(e.lhs->text)) {
            return static_field(e.lhs->text, e.text);
        }
        Value base = eval(*e.lhs, env);
        if (!std::holds_alternative<ObjPtr>(base.v) || !std::get<ObjPtr>(base.v))
            throw MjError("field access '" + e.text + "' on null or non-object");
        ObjPtr obj = std::get<ObjPtr>(base.v);
        auto it = obj->fields.find(e.text);
        if (it == obj->fields.end())
            throw MjError("unknown field " + e.text + " on " + obj->cls->fqName);
        return it->second;
    }

    Value eval_binary(const ast::Expr& e, Env& env) {
        const std::string& op = e.text;
        if (op == "&&") return Value(truthy(eval(*e.lhs, env)) && truthy(eval(*e.rhs, env)));
        if (op == "||") return Value(truthy(eval(*e.lhs, env)) || truthy(eval(*e.rhs, env)));
        Value a = eval(*e.lhs, env);
        Value b = eval(*e.rhs, env);
        if (op == "==") return Value(values_equal(a, b));
        if (op == "!=") return Value(!values_equal(a, b));

        if (std::holds_alternative<std::string>(a.v) && op == "+")
            return Value(std::get<std::string>(a.v) + stringify(b));

        bool bothInt =
            std::holds_alternative<long long>(a.v) && std::holds_alternative<long long>(b.v);
        if (bothInt) {
            long long x = std::get<long long>(a.v), y = std::get<long long>(b.v);
            if (op == "+") return Value(x + y);
            if (op == "-") return Value(x - y);
            if (op == "*") return Value(x * y);
            if (op == "/") {
                if (y == 0) throw MjError("division by zero");
                return Value(x / y);
            }
            if (op == "%") {
                if (y == 0) throw MjError("modulo by zero");
                return Value(x % y);
            }
            if (op == "<") return Value(x < y);
            if (op == "<=") return Value(x <= y);
            if (op == ">") return Value(x > y);
            if (op == ">=") return Value(x >= y);
        }
        double x = as_float(a, op), y = as_float(b, op);
        if (op == "+") return Value(x + y);
        if (op == "-") return Value(x - y);
        if (op == "*") return Value(x * y);
        if (op == "/") return Value(x / y);
        if (op == "%") return Value(std::fmod(x, y));
        if (op == "<") return Value(x < y);
        if (op == "<=") return Value(x <= y);
        if (op == ">") return Value(x > y);
        if (op == ">=") return Value(x >= y);
        throw MjError("unknown operator " + op);
    }

    static bool truthy(const Value& v) {
        if (std::holds_alternative<bool>(v.v)) return std::get<bool>(v.v);
        throw MjError("condition is not a bool");
    }

    static double as_float(const Value& v, const std::string& ctx) {
        if (std::holds_alternative<double>(v.v)) return std::get<double>(v.v);
        if (std::holds_alternative<long long>(v.v)) return double(std::get<long long>(v.v));
        throw MjError("expected a number in " + ctx);
    }

    static bool values_equal(const Value& a, const Value& b) {
        if (a.is_null() && b.is_null()) return true;
        if (std::holds_alternative<std::string>(a.v) && std::holds_alternative<std::string>(b.v))
            return std::get<std::string>(a.v) == std::get<std::string>(b.v);
        if (std::holds_alternative<bool>(a.v) && std::holds_alternative<bool>(b.v))
            return std::get<bool>(a.v) == std::get<bool>(b.v);
        if ((std::holds_alternative<long long>(a.v) || std::holds_alternative<double>(a.v)) &&
            (std::holds_alternative<long long>(b.v) || std::holds_alternative<double>(b.v)))
            return as_float(a, "==") == as_float(b, "==");
        if (std::holds_alternative<ObjPtr>(a.v) && std::holds_alternative<ObjPtr>(b.v)) {
            ObjPtr x = std::get<ObjPtr>(a.v), y = std::get<ObjPtr>(b.v);
            if (x && y && !x->enumConst.empty())
                return x->cls == y->cls && x->enumConst == y->enumConst;
            return x == y;
        }
        return false;
    }

    static std::string stringify(const Value& v) {
        if (std::holds_alternative<std::monostate>(v.v)) return "null";
        if (std::holds_alternative<long long>(v.v))
            return std::to_string(std::get<long long>(v.v));
        if (std::holds_alternative<double>(v.v)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", std::get<double>(v.v));
            return buf;
        }
        if (std::holds_alternative<bool>(v.v)) return std::get<bool>(v.v) ? "true" : "false";
        if (std::holds_alternative<std::string>(v.v)) return std::get<std::string>(v.v);
        if (std::holds_alternative<ObjPtr>(v.v)) {
            ObjPtr o = std::get<ObjPtr>(v.v);
            if (!o) return "null";
            if (!o->enumConst.empty()) return o->cls->fqName + "." + o->enumConst;
            return "<" + o->cls->fqName + ">";
        }
        return "<list>";
    }

    const Project* project_;
    std::map<std::string, std::map<std::string, Value>> statics_;
    std::set<std::string> staticsReady_;
    TraceSink traceSink_;
    std::function<void(const MethodModel&)> callHook_;
    std::string output_;
    long long assertionsEvaluated_ = 0;
    long long steps_ = 0;
    long long depth_ = 0;
    long long stepLimit_ = 5'000'000;
};

}  // namespace selertion
