#pragma once

#include "gjet/core/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gjet {

enum class Status { Pass, Fail, Inconclusive };

std::string_view to_string(Status s) noexcept;

/// Sample at which a condition failed or attained its extremal value.
/// xi and eta are empty when the condition has no direction arguments.
struct Witness
{
    Vec x;
    Vec y;
    double z = 0.0;
    Vec xi;
    Vec eta;
};

struct ConditionRecord
{
    std::string name;
    Status status = Status::Inconclusive;
    double extremal_value = 0.0;
    std::optional<Witness> witness;
    int samples_used = 0;
    /// Samples discarded because a stencil or solve left the admissible set.
    int samples_skipped = 0;
    std::string note;
};

struct ConditionReport
{
    std::vector<ConditionRecord> records;

    const ConditionRecord* find(std::string_view name) const;
    bool any_fail() const;
    void append(const ConditionReport& other);
};

}  // namespace gjet
