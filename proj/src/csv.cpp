#include "dispatchsim/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dispatchsim::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t at = line.find(sep, start);
        if (at == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, at - start));
        start = at + 1;
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + path.string());
}

std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf.data(), end);
}

std::string Row::column_name(std::size_t i) const {
    if (header_ && i < header_->size()) return (*header_)[i];
    return "column " + std::to_string(i + 1);
}

void Row::fail(const std::string& what) const { throw ParseError(source_, line_, what); }

double Row::real(std::size_t i) const {
    auto f = raw(i);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        fail(column_name(i) + ": not a number: '" + std::string(f) + "'");
    }
    return v;
}

std::int64_t Row::integer(std::size_t i) const {
    auto f = raw(i);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        fail(column_name(i) + ": not an integer: '" + std::string(f) + "'");
    }
    return v;
}

std::optional<std::int64_t> Row::optional_integer(std::size_t i) const {
    if (raw(i).empty()) return std::nullopt;
    return integer(i);
}

std::string Row::text(std::size_t i) const {
    auto f = raw(i);
    if (f.empty()) fail(column_name(i) + ": empty field");
    return std::string(f);
}

}  // namespace dispatchsim::csv
