#include "semproto/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "semproto/error.hpp"

namespace semproto {

std::string_view tag_name(Tag tag) {
    switch (tag) {
        case Tag::Null: return "null";
        case Tag::Int: return "int";
        case Tag::Decimal: return "decimal";
        case Tag::Str: return "str";
        case Tag::Date: return "date";
    }
    return "?";
}

std::optional<Tag> parse_tag(std::string_view text) {
    if (text == "int") return Tag::Int;
    if (text == "decimal") return Tag::Decimal;
    if (text == "str") return Tag::Str;
    if (text == "date") return Tag::Date;
    return std::nullopt;
}

bool Date::valid(int year, int month, int day) {
    if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int limit = kDays[month - 1];
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) limit = 29;
    return day <= limit;
}

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        auto sub = text.substr(pos, len);
        auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), v);
        if (ec != std::errc() || ptr != sub.data() + sub.size()) return std::nullopt;
        return v;
    };
    auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
    if (!y || !m || !d || !valid(*y, *m, *d)) return std::nullopt;
    return Date{*y, *m, *d};
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

namespace {

std::string format_decimal(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, ptr);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

}  // namespace

std::string Value::literal() const {
    switch (tag()) {
        case Tag::Null: return "null";
        case Tag::Int: return std::to_string(as_int());
        case Tag::Decimal: return format_decimal(as_decimal());
        case Tag::Date: return as_date().str();
        case Tag::Str: {
            std::string out = "'";
            for (char c : as_str()) {
                if (c == '\'') out += '\'';
                out += c;
            }
            return out + "'";
        }
    }
    return {};
}

std::string Value::plain() const {
    if (tag() == Tag::Str) return as_str();
    return literal();
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.payload_.index() != b.payload_.index()) return a.payload_.index() <=> b.payload_.index();
    switch (a.tag()) {
        case Tag::Null: return std::strong_ordering::equal;
        case Tag::Int: return a.as_int() <=> b.as_int();
        case Tag::Decimal: {
            // Total order over doubles; NaN never reaches here (cells reject it).
            double x = a.as_decimal(), y = b.as_decimal();
            if (x < y) return std::strong_ordering::less;
            if (y < x) return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }
        case Tag::Str: return a.as_str() <=> b.as_str();
        case Tag::Date: return a.as_date() <=> b.as_date();
    }
    return std::strong_ordering::equal;
}

Value parse_cell(std::string_view text, Tag tag) {
    switch (tag) {
        case Tag::Null: return Value::null();
        case Tag::Str: return Value::str(std::string(text));
        case Tag::Int: {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
                throw ParseError("invalid int '" + std::string(text) + "'");
            return Value::integer(v);
        }
        case Tag::Decimal: {
            double v = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
                !std::isfinite(v))
                throw ParseError("invalid decimal '" + std::string(text) + "'");
            return Value::decimal(v);
        }
        case Tag::Date: {
            auto d = Date::parse(text);
            if (!d) throw ParseError("invalid date '" + std::string(text) + "'");
            return Value::date(*d);
        }
    }
    return Value::null();
}

}  // namespace semproto
