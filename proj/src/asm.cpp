#include "kbt/asm.hpp"

#include "kbt/error.hpp"

namespace kbt {

Selection run_asm(const Asm& m, const History& h)
{
    if (h.empty())
        throw Error("run_asm needs a non-empty history");
    auto session = m.start();
    Selection last;
    for (const auto& x : h)
        last = session->step(x);
    return last;
}

std::vector<Selection> trace_asm(const Asm& m, const History& h)
{
    std::vector<Selection> out;
    out.reserve(h.size());
    auto session = m.start();
    for (const auto& x : h)
        out.push_back(session->step(x));
    return out;
}

DelegateSlots::DelegateSlots(const DelegateSlots& other)
{
    for (const auto& [k, s] : other.slots_)
        slots_.emplace(k, Slot{s.session->clone(), s.stepped});
}

DelegateSlots& DelegateSlots::operator=(const DelegateSlots& other)
{
    if (this != &other) {
        DelegateSlots copy(other);
        slots_ = std::move(copy.slots_);
    }
    return *this;
}

std::optional<Selection> DelegateSlots::step(std::size_t slot, const ActionRef& ref, const InputState& x)
{
    if (!ref.delegate)
        return std::nullopt;
    auto it = slots_.find(slot);
    if (it == slots_.end())
        it = slots_.emplace(slot, Slot{ref.delegate->start(), false}).first;
    it->second.stepped = true;
    return it->second.session->step(x);
}

void DelegateSlots::end_step()
{
    for (auto it = slots_.begin(); it != slots_.end();) {
        if (!it->second.stepped) {
            it = slots_.erase(it);
        } else {
            it->second.stepped = false;
            ++it;
        }
    }
}

} // namespace kbt
