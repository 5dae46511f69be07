#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace semproto {

enum class Tag { Null, Int, Decimal, Str, Date };

std::string_view tag_name(Tag tag);
/// Parses a manifest tag (`int|decimal|str|date`).
std::optional<Tag> parse_tag(std::string_view text);

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    static bool valid(int year, int month, int day);
    /// Parses `YYYY-MM-DD`; nullopt on malformed or out-of-calendar input.
    static std::optional<Date> parse(std::string_view text);
    std::string str() const;
};

/// Tagged scalar. Ordering is total (tag first, then payload) so values can
/// live in ordered sets; it is not the comparison used by conditions.
class Value {
public:
    Value() = default;
    static Value null() { return Value(); }
    static Value integer(std::int64_t v) { return Value(Payload(v)); }
    static Value decimal(double v) { return Value(Payload(v)); }
    static Value str(std::string v) { return Value(Payload(std::move(v))); }
    static Value date(Date v) { return Value(Payload(v)); }

    Tag tag() const { return static_cast<Tag>(payload_.index()); }
    bool is_null() const { return tag() == Tag::Null; }

    std::int64_t as_int() const { return std::get<std::int64_t>(payload_); }
    double as_decimal() const { return std::get<double>(payload_); }
    const std::string& as_str() const { return std::get<std::string>(payload_); }
    const Date& as_date() const { return std::get<Date>(payload_); }

    /// Literal-style rendering: `12`, `1.5`, `'text'`, `2009-01-31`, `null`.
    std::string literal() const;
    /// Plain rendering without quotes, used in CSV-like and text output.
    std::string plain() const;

    friend bool operator==(const Value& a, const Value& b) { return a.payload_ == b.payload_; }
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    using Payload = std::variant<std::monostate, std::int64_t, double, std::string, Date>;
    explicit Value(Payload p) : payload_(std::move(p)) {}
    Payload payload_;
};

/// Parses one CSV cell for a column of the given tag. Throws ParseError.
Value parse_cell(std::string_view text, Tag tag);

}  // namespace semproto
