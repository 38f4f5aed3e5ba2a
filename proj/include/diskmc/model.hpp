#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diskmc/expr.hpp"

namespace diskmc {

// Finite-domain integer variable. Bounds and init are folded to literals by
// the parser (constant expressions are allowed in the source text).
struct VariableDecl {
    std::string name;
    int32_t lower = 0;
    int32_t upper = 0;
    int32_t init = 0;
    SourcePos pos;
};

struct ConstDecl {
    std::string name;
    Value value;
    SourcePos pos;
};

// One assignment inside an alternative: (var' = value).
struct UpdateAssign {
    std::string var;
    int32_t var_index = -1; // resolved by type checking
    ExprPtr value;
    SourcePos pos;
};

// One probabilistic branch of a command. A missing probability means 1; a
// missing reward means 0; an empty update list leaves the state unchanged.
struct Alternative {
    ExprPtr probability;
    ExprPtr reward;
    std::vector<UpdateAssign> updates;
};

// Guarded command: [] guard -> p1 : updates reward r + p2 : ... ;
struct Command {
    ExprPtr guard;
    std::vector<Alternative> alternatives;
    SourcePos pos;
};

enum class PropertyKind : uint8_t { Probability, ExpectedReward };
enum class Direction : uint8_t { Max, Min };

// property name = Pmax(target);  with Pmax | Pmin | Rmax | Rmin.
struct PropertyDecl {
    std::string name;
    PropertyKind kind = PropertyKind::Probability;
    Direction direction = Direction::Max;
    ExprPtr target;
    SourcePos pos;
};

// partition expr bound k;  maps every state to a block id in 1..bound.
struct PartitionDecl {
    ExprPtr expr;
    int32_t bound = 1;
    SourcePos pos;
};

struct ModelAst {
    std::vector<ConstDecl> constants;
    std::vector<VariableDecl> variables;
    std::vector<Command> commands;
    std::vector<PropertyDecl> properties;
    std::optional<PartitionDecl> partition;
};

// Structural equality over everything the printer emits.
bool model_equal(const ModelAst& a, const ModelAst& b);

// Canonical text form. parse_model(print_model(m)) is structurally equal to m.
std::string print_model(const ModelAst& m);

struct ParseResult {
    std::optional<ModelAst> ast; // present only when errors is empty
    std::vector<Diagnostic> errors;
};

ParseResult parse_model(std::string_view text);

// Fragment parsers for command-line overrides. They resolve names against the
// given model's constants (substituted) but leave variables to type checking.
// On failure the errors list is non-empty.
struct PropertyFragmentResult {
    std::optional<PropertyDecl> property;
    std::vector<Diagnostic> errors;
};
PropertyFragmentResult parse_property_fragment(std::string_view text, const ModelAst& context);

struct PartitionFragmentResult {
    std::optional<PartitionDecl> partition;
    std::vector<Diagnostic> errors;
};
PartitionFragmentResult parse_partition_fragment(std::string_view text, const ModelAst& context);

// A model whose expressions carry resolved variable indices and type
// annotations. Commands/properties/partition are deep copies of the AST.
struct TypedModel {
    std::vector<VariableDecl> variables;
    std::vector<Command> commands;
    std::vector<PropertyDecl> properties;
    std::optional<PartitionDecl> partition;

    size_t width() const { return variables.size(); }
    const PropertyDecl* find_property(std::string_view name) const;
};

struct TypeCheckResult {
    std::optional<TypedModel> model;
    std::vector<Diagnostic> errors;
};

TypeCheckResult type_check(const ModelAst& ast);

// Type-check a property/partition fragment against an already checked model
// (resolves variables, checks types). Throws ModelError on failure.
PropertyDecl type_check_property(const TypedModel& m, const PropertyDecl& p);
PartitionDecl type_check_partition(const TypedModel& m, const PartitionDecl& p);

} // namespace diskmc
