#include "gjet/conditions/report.hpp"

#include <algorithm>

namespace gjet {

std::string_view to_string(Status s) noexcept
{
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

const ConditionRecord* ConditionReport::find(std::string_view name) const
{
    for (const auto& r : records)
        if (r.name == name)
            return &r;
    return nullptr;
}

bool ConditionReport::any_fail() const
{
    return std::any_of(records.begin(), records.end(),
                       [](const ConditionRecord& r) { return r.status == Status::Fail; });
}

void ConditionReport::append(const ConditionReport& other)
{
    records.insert(records.end(), other.records.begin(), other.records.end());
}

}  // namespace gjet
