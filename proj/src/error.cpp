#include "kbt/error.hpp"

#include <sstream>

namespace kbt {

std::string to_string(const Diagnostic& d)
{
    std::ostringstream out;
    out << d.location.line << ':' << d.location.column << ": " << d.message;
    return out.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& ds)
{
    std::string s;
    for (const auto& d : ds) {
        if (!s.empty())
            s += '\n';
        s += to_string(d);
    }
    return s;
}

} // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

} // namespace kbt
