#include "diskmc/model.hpp"

#include <map>

namespace diskmc {

namespace {

class Checker {
public:
    explicit Checker(const std::vector<VariableDecl>& vars, std::vector<Diagnostic>* errors)
        : errors_(errors) {
        for (size_t k = 0; k < vars.size(); ++k)
            index_[vars[k].name] = static_cast<int32_t>(k);
    }

    // Resolves variable references and annotates types in place.
    Type infer(Expr& e) {
        switch (e.kind) {
        case ExprKind::Literal:
            return e.type = e.literal.type;
        case ExprKind::Var: {
            auto it = index_.find(e.name);
            if (it == index_.end()) {
                report(e.pos, "unknown identifier '" + e.name + "'");
                return e.type = Type::Int;
            }
            e.var_index = it->second;
            return e.type = Type::Int;
        }
        case ExprKind::Unary: {
            Type a = infer(*e.children[0]);
            if (e.uop == UnaryOp::Not) {
                require(a == Type::Bool, e.pos, "operand of '!' must be bool");
                return e.type = Type::Bool;
            }
            require(a != Type::Bool, e.pos, "operand of unary '-' must be numeric");
            return e.type = a;
        }
        case ExprKind::Ite: {
            Type c = infer(*e.children[0]);
            require(c == Type::Bool, e.pos, "condition of '?:' must be bool");
            Type t = infer(*e.children[1]);
            Type f = infer(*e.children[2]);
            if (t == f) return e.type = t;
            if (t != Type::Bool && f != Type::Bool) return e.type = Type::Real;
            report(e.pos, "branches of '?:' mix bool and numeric");
            return e.type = t;
        }
        case ExprKind::Binary:
            break;
        }

        Type a = infer(*e.children[0]);
        Type b = infer(*e.children[1]);
        bool numeric = a != Type::Bool && b != Type::Bool;
        switch (e.bop) {
        case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul:
        case BinaryOp::Min: case BinaryOp::Max:
            require(numeric, e.pos, "arithmetic operands must be numeric");
            return e.type = (a == Type::Real || b == Type::Real) ? Type::Real : Type::Int;
        case BinaryOp::Div:
            require(numeric, e.pos, "operands of '/' must be numeric");
            return e.type = Type::Real;
        case BinaryOp::Eq: case BinaryOp::Ne:
            if (a == Type::Bool || b == Type::Bool)
                require(a == Type::Bool && b == Type::Bool, e.pos,
                        "'=' mixes bool and numeric operands");
            return e.type = Type::Bool;
        case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge:
            require(numeric, e.pos, "comparison operands must be numeric");
            return e.type = Type::Bool;
        case BinaryOp::And: case BinaryOp::Or:
            require(a == Type::Bool && b == Type::Bool, e.pos,
                    "operands of '&'/'|' must be bool");
            return e.type = Type::Bool;
        }
        return e.type = Type::Int;
    }

    void check_typed(Expr& e, Type want, const char* what) {
        Type got = infer(e);
        if (want == Type::Real && got == Type::Int) return; // int -> real promotion
        require(got == want, e.pos,
                std::string(what) + " must be " + type_name(want) + ", got " + type_name(got));
    }

    void require(bool ok, SourcePos pos, const std::string& msg) {
        if (!ok) report(pos, msg);
    }

    void report(SourcePos pos, const std::string& msg) {
        if (errors_) {
            errors_->push_back({pos, msg});
        } else {
            throw ModelError(Diagnostic{pos, msg}.to_string());
        }
    }

private:
    std::map<std::string, int32_t, std::less<>> index_;
    std::vector<Diagnostic>* errors_;
};

Command clone_command(const Command& c) {
    Command out;
    out.pos = c.pos;
    out.guard = c.guard->clone();
    for (const auto& alt : c.alternatives) {
        Alternative a;
        if (alt.probability) a.probability = alt.probability->clone();
        if (alt.reward) a.reward = alt.reward->clone();
        for (const auto& u : alt.updates)
            a.updates.push_back({u.var, u.var_index, u.value->clone(), u.pos});
        out.alternatives.push_back(std::move(a));
    }
    return out;
}

PropertyDecl clone_property(const PropertyDecl& p) {
    return {p.name, p.kind, p.direction, p.target->clone(), p.pos};
}

PartitionDecl clone_partition(const PartitionDecl& p) {
    return {p.expr->clone(), p.bound, p.pos};
}

void check_command(Checker& ck, Command& c, const std::vector<VariableDecl>& vars,
                   const std::map<std::string, int32_t, std::less<>>& index) {
    ck.check_typed(*c.guard, Type::Bool, "guard");
    for (auto& alt : c.alternatives) {
        if (alt.probability) ck.check_typed(*alt.probability, Type::Real, "probability");
        if (alt.reward) ck.check_typed(*alt.reward, Type::Real, "reward");
        for (auto& u : alt.updates) {
            auto it = index.find(u.var);
            if (it == index.end()) {
                ck.report(u.pos, "unknown variable '" + u.var + "' in update");
                continue;
            }
            u.var_index = it->second;
            ck.check_typed(*u.value, Type::Int, "update value");
        }
    }
    (void)vars;
}

} // namespace

const PropertyDecl* TypedModel::find_property(std::string_view name) const {
    for (const auto& p : properties)
        if (p.name == name) return &p;
    return nullptr;
}

TypeCheckResult type_check(const ModelAst& ast) {
    TypeCheckResult r;
    TypedModel m;
    m.variables = ast.variables;

    Checker ck(m.variables, &r.errors);
    std::map<std::string, int32_t, std::less<>> index;
    for (size_t k = 0; k < m.variables.size(); ++k)
        index[m.variables[k].name] = static_cast<int32_t>(k);

    for (const auto& c : ast.commands) {
        Command tc = clone_command(c);
        check_command(ck, tc, m.variables, index);
        m.commands.push_back(std::move(tc));
    }
    for (const auto& p : ast.properties) {
        PropertyDecl tp = clone_property(p);
        ck.check_typed(*tp.target, Type::Bool, "property target");
        m.properties.push_back(std::move(tp));
    }
    if (ast.partition) {
        PartitionDecl tp = clone_partition(*ast.partition);
        ck.check_typed(*tp.expr, Type::Int, "partition expression");
        m.partition = std::move(tp);
    }

    if (r.errors.empty()) r.model = std::move(m);
    return r;
}

PropertyDecl type_check_property(const TypedModel& m, const PropertyDecl& p) {
    Checker ck(m.variables, nullptr);
    PropertyDecl tp = clone_property(p);
    ck.check_typed(*tp.target, Type::Bool, "property target");
    return tp;
}

PartitionDecl type_check_partition(const TypedModel& m, const PartitionDecl& p) {
    Checker ck(m.variables, nullptr);
    PartitionDecl tp = clone_partition(p);
    ck.check_typed(*tp.expr, Type::Int, "partition expression");
    return tp;
}

} // namespace diskmc
