#pragma once

#include <string>
#include <string_view>

#include <fmt/format.h>

namespace freqq::detail {

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

/// Splits on LF, strips a trailing CR and a leading UTF-8 BOM.
class LineReader {
public:
    explicit LineReader(std::string_view text) : rest_(text) {
        if (rest_.starts_with("\xEF\xBB\xBF")) {
            rest_.remove_prefix(3);
        }
    }

    bool next(std::string_view& line) {
        if (done_) {
            return false;
        }
        const auto pos = rest_.find('\n');
        if (pos == std::string_view::npos) {
            line = rest_;
            done_ = true;
        } else {
            line = rest_.substr(0, pos);
            rest_.remove_prefix(pos + 1);
        }
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        return true;
    }

private:
    std::string_view rest_;
    bool done_ = false;
};

/// Fixed 6-decimal rendering with trailing zeros (and a bare '.') removed: 1.500000 -> 1.5, 3.000000 -> 3.
inline void append_trimmed_decimal(std::string& out, double value) {
    const auto start = out.size();
    fmt::format_to(std::back_inserter(out), "{:.6f}", value);
    auto end = out.find_last_not_of('0');
    if (end != std::string::npos && end >= start && out[end] == '.') {
        --end;
    }
    out.resize(end + 1);
    if (out.size() - start == 2 && out[start] == '-' && out[start + 1] == '0') {
        out.erase(start, 1);
    }
}

}  // namespace freqq::detail
