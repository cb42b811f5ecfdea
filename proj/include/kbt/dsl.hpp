#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kbt/analysis.hpp"
#include "kbt/blackboard.hpp"
#include "kbt/classic.hpp"
#include "kbt/error.hpp"
#include "kbt/extensions.hpp"
#include "kbt/tree.hpp"
#include "kbt/world.hpp"

namespace kbt {

// ---- Abstract syntax ---------------------------------------------------------

// Tree expression before name resolution.
struct TreeExpr
{
    enum class Kind
    {
        leaf,          // name
        control,       // name = handled value, memory flag
        negation,
        until_success,
        times,         // count
        map,           // policy
        parallel,      // count = threshold
        utility,       // scores, one per child
    };

    Kind kind = Kind::leaf;
    std::string name;
    bool memory = false;
    unsigned count = 0;
    // "Success", "~" (anonymous unhandled) or "_" (any other / unchanged)
    std::vector<std::pair<std::string, std::string>> policy;
    std::vector<TreeExpr> children;
    std::vector<ScoreRule> scores;

    friend bool operator==(const TreeExpr&, const TreeExpr&) = default;
};

// Same-handled non-memory controls merged into their parent.
TreeExpr flattened(TreeExpr e);

struct DtExpr
{
    // Leaf when branches is empty.
    std::string action;
    ConditionExpr test;
    std::vector<DtExpr> branches; // {if_true, if_false}

    friend bool operator==(const DtExpr&, const DtExpr&) = default;
};

struct ValuesDecl
{
    std::vector<std::string> values;
    friend bool operator==(const ValuesDecl&, const ValuesDecl&) = default;
};

struct VarDecl
{
    VariableDecl var;
    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct ActionDecl
{
    std::string name;
    std::string embeds; // empty for a plain action
    ReturnRule returns;
    friend bool operator==(const ActionDecl&, const ActionDecl&) = default;
};

struct CondDecl
{
    std::string name;
    ConditionExpr expr;
    friend bool operator==(const CondDecl&, const CondDecl&) = default;
};

struct TreeDecl
{
    std::string name;
    std::vector<std::string> values; // empty: the model's values
    TreeExpr body;
    friend bool operator==(const TreeDecl&, const TreeDecl&) = default;
};

struct FsmDecl
{
    struct Edge
    {
        std::string from;
        ConditionExpr guard;
        std::string to;
        friend bool operator==(const Edge&, const Edge&) = default;
    };
    std::string name;
    std::string initial;
    std::vector<Edge> edges;
    std::vector<std::pair<std::string, std::string>> labels; // state, target
    friend bool operator==(const FsmDecl&, const FsmDecl&) = default;
};

struct DtDecl
{
    std::string name;
    DtExpr body;
    friend bool operator==(const DtDecl&, const DtDecl&) = default;
};

struct TrDecl
{
    std::string name;
    std::vector<std::pair<ConditionExpr, std::string>> rules;
    friend bool operator==(const TrDecl&, const TrDecl&) = default;
};

struct BlackboardDecl
{
    std::string name;
    std::string tree;
    std::vector<BlackboardRule> rules;
    friend bool operator==(const BlackboardDecl& a, const BlackboardDecl& b);
};

struct StyleDecl
{
    std::string name;
    std::string tree;
    std::vector<unsigned> disabled;
    friend bool operator==(const StyleDecl&, const StyleDecl&) = default;
};

struct AlphabetDecl
{
    std::string name;
    std::vector<std::pair<std::string, std::vector<int>>> axes;
    friend bool operator==(const AlphabetDecl&, const AlphabetDecl&) = default;
};

struct StackDecl
{
    std::string name;
    std::vector<std::pair<std::string, std::string>> layers; // layer, ASM
    friend bool operator==(const StackDecl&, const StackDecl&) = default;
};

struct WorldArg
{
    // int, identifier or list of strings
    std::variant<int, std::string, std::vector<std::string>> value;
    bool quoted = false; // string literal rather than identifier
    friend bool operator==(const WorldArg&, const WorldArg&) = default;
};

struct WorldDecl
{
    std::string name;
    std::string kind; // battery | grid | door
    std::vector<std::pair<std::string, WorldArg>> args;
    friend bool operator==(const WorldDecl&, const WorldDecl&) = default;
};

using DeclBody = std::variant<ValuesDecl, VarDecl, ActionDecl, CondDecl, TreeDecl, FsmDecl, DtDecl, TrDecl,
                              BlackboardDecl, StyleDecl, AlphabetDecl, StackDecl, WorldDecl>;

struct Declaration
{
    SourceLocation location;
    DeclBody body;
};

// ---- Resolved model ----------------------------------------------------------

class Model;
Model parse_model(std::string_view text);

class Model
{
public:
    const std::vector<Declaration>& declarations() const noexcept { return decls_; }
    const ValueSet& values() const noexcept { return values_; }
    const std::vector<VariableDecl>& variables() const noexcept { return variables_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Every ASM (trees, styles, fsm, dt, tr, blackboard) in declaration order.
    std::vector<std::string> asm_names() const;
    bool has_asm(const std::string& name) const { return asms_.count(name) != 0; }
    AsmPtr asm_named(const std::string& name) const;
    KBTreePtr tree(const std::string& name) const;
    FsmPtr fsm(const std::string& name) const;
    std::shared_ptr<const DecisionTree> dt(const std::string& name) const;
    std::shared_ptr<const TeleoReactive> tr(const std::string& name) const;
    std::shared_ptr<const BlackboardTree> blackboard(const std::string& name) const;

    InputAlphabet alphabet(const std::string& name) const;
    ControllerStack stack(const std::string& name) const;
    std::unique_ptr<World> world(const std::string& name) const;
    std::vector<std::string> world_names() const;

    // Equality of the declarations, ignoring source locations.
    friend bool operator==(const Model& a, const Model& b);

private:
    friend class ModelBuilder;
    friend Model parse_model(std::string_view text);
    std::vector<Declaration> decls_;
    ValueSet values_ = ValueSet::classic();
    std::vector<VariableDecl> variables_;
    std::vector<std::string> warnings_;
    std::vector<std::string> asm_order_;
    std::map<std::string, AsmPtr> asms_;
    std::map<std::string, InputAlphabet> alphabets_;
    std::map<std::string, ControllerStack> stacks_;
    std::map<std::string, std::shared_ptr<const World>> worlds_;
};

// Throws ParseError carrying every diagnostic with its line and column.
Model parse_model(std::string_view text);
// Canonical text; parse_model(format_model(m)) == m.
std::string format_model(const Model& m);

// Builds a tree from one infix expression. Unknown leaves become actions
// that always return the anonymous unhandled value.
KBTree infix_compose(std::string_view expr, const ValueSet& values = ValueSet::classic());

// Canonical infix text of a tree.
std::string format_tree(const KBTree& t);
std::string format_tree_expr(const TreeExpr& e);

} // namespace kbt
