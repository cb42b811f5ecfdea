#include "kbt/value.hpp"

#include <algorithm>

namespace kbt {

std::string to_string(const ReturnValue& v)
{
    return v ? v->str() : std::string("~");
}

ValueSet::ValueSet(std::vector<ValueName> values) : values_(std::move(values))
{
    if (values_.empty())
        throw ConstructionError("a value set needs at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i)
        for (std::size_t j = i + 1; j < values_.size(); ++j)
            if (values_[i] == values_[j])
                throw ConstructionError("duplicate value '" + values_[i].str() + "' in value set");
}

ValueSet ValueSet::classic()
{
    return ValueSet({success_value(), failure_value()});
}

bool ValueSet::contains(const ValueName& v) const
{
    return std::find(values_.begin(), values_.end(), v) != values_.end();
}

bool ValueSet::has_success_failure() const
{
    return contains(success_value()) && contains(failure_value());
}

std::string to_string(const Selection& s)
{
    std::string out = s.action.str();
    out += '/';
    if (!s.handled)
        out += '~';
    if (s.value)
        out += s.value->str();
    return out;
}

} // namespace kbt
