#pragma once

#include "dispatchsim/error.hpp"

namespace dispatchsim::csv {

template <typename F>
void read_content(const std::string& content, const std::string& source, std::string_view expected_header,
                  F&& on_row) {
    const std::vector<std::string> header = [&] {
        std::vector<std::string> h;
        for (auto f : split(expected_header)) h.emplace_back(f);
        return h;
    }();

    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool seen_header = false;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string_view line(content.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            throw ParseError(source, line_no, "CR line ending; files must use LF");
        }
        if (!seen_header) {
            if (line != expected_header) {
                throw ParseError(source, line_no,
                                 "unexpected header '" + std::string(line) + "', expected '" +
                                     std::string(expected_header) + "'");
            }
            seen_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != header.size()) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        on_row(Row(source, line_no, std::move(fields), &header));
    }
    if (!seen_header) throw ParseError(source, 1, "empty file, missing header");
}

template <typename F>
void read_file(const std::filesystem::path& path, std::string_view expected_header, F&& on_row) {
    read_content(read_text(path), path.filename().string(), expected_header, std::forward<F>(on_row));
}

}  // namespace dispatchsim::csv
