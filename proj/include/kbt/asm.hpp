#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbt/input.hpp"
#include "kbt/value.hpp"

namespace kbt {

// Evaluation context of one running action-selection mechanism. Stateless
// architectures still get one so that anything they embed can keep state.
class Session
{
public:
    virtual ~Session() = default;

    virtual Selection step(const InputState& x) = 0;
    virtual std::unique_ptr<Session> clone() const = 0;
};

// The uniform "history of inputs -> selected action" interface that every
// architecture implements and nests through. Definitions are immutable;
// all mutable state lives in the sessions they start.
class Asm
{
public:
    virtual ~Asm() = default;

    virtual std::unique_ptr<Session> start() const = 0;
    // "tree", "fsm", "dt", "tr", "blackboard"
    virtual std::string_view kind() const = 0;
};

using AsmPtr = std::shared_ptr<const Asm>;

// Feeds h in order to a fresh session and returns the last selection.
Selection run_asm(const Asm& m, const History& h);
// One selection per input; back() == run_asm(m, h).
std::vector<Selection> trace_asm(const Asm& m, const History& h);

// Leaf of a DT/TR/FSM label: either a plain action or an embedded ASM whose
// own selection is reported when this leaf is chosen.
struct ActionRef
{
    ActionId id;
    AsmPtr delegate;
    std::string delegate_name;
    std::string delegate_kind;

    ActionRef() = default;
    explicit ActionRef(ActionId a) : id(std::move(a)) {}
    ActionRef(ActionId a, AsmPtr m, std::string name, std::string kind)
        : id(std::move(a)), delegate(std::move(m)), delegate_name(std::move(name)), delegate_kind(std::move(kind))
    {
    }

    bool embeds() const { return delegate != nullptr; }
};

// Sessions of embedded ASMs, one per slot. A slot keeps its session only
// while it is selected on consecutive steps; a step that does not select
// it resets it to the initial state.
class DelegateSlots
{
public:
    DelegateSlots() = default;
    DelegateSlots(const DelegateSlots& other);
    DelegateSlots& operator=(const DelegateSlots& other);
    DelegateSlots(DelegateSlots&&) noexcept = default;
    DelegateSlots& operator=(DelegateSlots&&) noexcept = default;

    // Steps the embedded ASM of ref (if any) and returns its selection.
    std::optional<Selection> step(std::size_t slot, const ActionRef& ref, const InputState& x);
    // Drops every slot not stepped since the previous call.
    void end_step();
    std::size_t live() const { return slots_.size(); }

private:
    struct Slot
    {
        std::unique_ptr<Session> session;
        bool stepped = false;
    };
    std::map<std::size_t, Slot> slots_;
};

} // namespace kbt
