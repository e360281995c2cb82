#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dispatchsim::csv {

// One data row of a CSV file, with enough context to produce ParseErrors
// that point at the offending line and column.
class Row {
public:
    Row(std::string source, std::size_t line, std::vector<std::string_view> fields,
        const std::vector<std::string>* header)
        : source_(std::move(source)), line_(line), fields_(std::move(fields)), header_(header) {}

    std::size_t line() const { return line_; }
    std::size_t size() const { return fields_.size(); }
    std::string_view raw(std::size_t i) const { return fields_.at(i); }

    double real(std::size_t i) const;
    std::int64_t integer(std::size_t i) const;
    std::optional<std::int64_t> optional_integer(std::size_t i) const;
    std::string text(std::size_t i) const;

    [[noreturn]] void fail(const std::string& what) const;

private:
    std::string column_name(std::size_t i) const;

    std::string source_;
    std::size_t line_;
    std::vector<std::string_view> fields_;
    const std::vector<std::string>* header_;
};

// Parses CSV text whose first line must equal `expected_header`; `source`
// names the text in errors.
template <typename F>
void read_content(const std::string& content, const std::string& source, std::string_view expected_header,
                  F&& on_row);

// Reads a whole file, checks that the header matches `expected_header`
// exactly, and invokes `on_row` for every non-empty data line.
template <typename F>
void read_file(const std::filesystem::path& path, std::string_view expected_header, F&& on_row);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);

// Shortest representation that parses back to the same double.
std::string format_real(double v);

}  // namespace dispatchsim::csv

#include "dispatchsim/csv_impl.hpp"
