#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chartforge/chart_type.hpp"
#include "chartforge/table.hpp"

namespace chartforge {

enum class StubKind { OpenQa, Summary };

std::string_view to_string(StubKind k);

/// Rule-based stand-in for free-text records. Every number in `response` is
/// copied from the table.
struct TextStub {
    StubKind kind = StubKind::OpenQa;
    std::string instruction;
    std::string response;
    std::string rule;  // which fact the text states
};

TextStub open_qa_stub(const DataTable& table, ChartType type, std::uint64_t seed);
TextStub summary_stub(const DataTable& table, ChartType type, std::uint64_t seed);

/// Both kinds, open QA first.
std::vector<TextStub> open_qa_and_summary_stubs(const DataTable& table, ChartType type, std::uint64_t seed);

/// Numeric literals in free text, in order of appearance.
std::vector<double> extract_numbers(std::string_view text);

/// Numbers printed in `text` that do not occur in the table's cells, labels,
/// title or axis labels.
std::vector<double> ungrounded_numbers(std::string_view text, const DataTable& table);

}  // namespace chartforge
