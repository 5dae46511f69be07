#include <cctype>
#include <charconv>

#include "semproto/error.hpp"
#include "semproto/ontology.hpp"
#include "semproto/protocol.hpp"

namespace semproto {
namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Decimal,
    String,
    Date,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Dot,
    Star,
    Cmp,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        auto single = [&](Tok k) {
            t.kind = k;
            t.text = std::string(1, c);
            advance();
            return t;
        };
        switch (c) {
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case '{': return single(Tok::LBrace);
            case '}': return single(Tok::RBrace);
            case ',': return single(Tok::Comma);
            case ':': return single(Tok::Colon);
            case ';': return single(Tok::Semi);
            case '.': return single(Tok::Dot);
            case '*': return single(Tok::Star);
            default: break;
        }
        if (c == '=' || c == '<' || c == '>' || c == '!') {
            t.kind = Tok::Cmp;
            t.text = std::string(1, c);
            advance();
            if (pos_ < src_.size() && src_[pos_] == '=' && c != '=') {
                t.text += '=';
                advance();
            }
            if (t.text == "!") fail("expected '!='", t);
            return t;
        }
        if (c == '\'') return string_literal(t);
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))
            return number(t);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                t.text += src_[pos_];
                advance();
            }
            return t;
        }
        fail(std::string("unexpected character '") + c + "'", t);
    }

    [[noreturn]] static void fail(const std::string& msg, const Token& at) {
        throw ParseError(msg, at.line, at.column);
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            bool comment = c == '#' ||
                           (pos_ + 1 < src_.size() && ((c == '-' && src_[pos_ + 1] == '-') ||
                                                       (c == '/' && src_[pos_ + 1] == '/')));
            if (comment) {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token string_literal(Token t) {
        t.kind = Tok::String;
        advance();
        while (true) {
            if (pos_ >= src_.size()) fail("unterminated string literal", t);
            char c = src_[pos_];
            advance();
            if (c == '\'') {
                if (pos_ < src_.size() && src_[pos_] == '\'') {
                    t.text += '\'';
                    advance();
                    continue;
                }
                break;
            }
            t.text += c;
        }
        return t;
    }

    Token number(Token t) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                t.text += src_[pos_];
                advance();
            }
        };
        if (src_[pos_] == '-') {
            t.text += '-';
            advance();
        }
        digits();
        t.kind = Tok::Int;
        bool negative = t.text[0] == '-';
        // YYYY-MM-DD
        if (!negative && t.text.size() == 4 && pos_ < src_.size()) {
            auto rest = src_.substr(pos_, 6);
            if (rest.size() == 6 && rest[0] == '-' && std::isdigit((unsigned char)rest[1]) &&
                std::isdigit((unsigned char)rest[2]) && rest[3] == '-' &&
                std::isdigit((unsigned char)rest[4]) && std::isdigit((unsigned char)rest[5])) {
                for (int i = 0; i < 6; ++i) {
                    t.text += src_[pos_];
                    advance();
                }
                t.kind = Tok::Date;
                if (!Date::parse(t.text)) fail("invalid date literal '" + t.text + "'", t);
                return t;
            }
        }
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            t.text += '.';
            advance();
            digits();
            t.kind = Tok::Decimal;
        }
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

    std::vector<Statement> protocol() {
        std::vector<Statement> out;
        while (cur_.kind != Tok::End) out.push_back(statement());
        return out;
    }

private:
    bool keyword(std::string_view kw) const {
        return cur_.kind == Tok::Ident && iequals(cur_.text, kw);
    }

    static bool reserved(std::string_view word) {
        for (auto kw : {"get", "from", "where", "if", "else", "do", "null"})
            if (iequals(word, kw)) return true;
        return false;
    }

    Token take() {
        Token t = cur_;
        cur_ = lex_.next();
        return t;
    }

    Token expect(Tok kind, std::string_view what) {
        if (cur_.kind != kind) Lexer::fail("expected " + std::string(what) + describe(), cur_);
        return take();
    }

    void expect_keyword(std::string_view kw) {
        if (!keyword(kw)) Lexer::fail("expected '" + std::string(kw) + "'" + describe(), cur_);
        take();
    }

    std::string describe() const {
        if (cur_.kind == Tok::End) return " but reached end of input";
        return " but found '" + cur_.text + "'";
    }

    std::string name(std::string_view what) {
        if (cur_.kind != Tok::Ident || reserved(cur_.text))
            Lexer::fail("expected " + std::string(what) + describe(), cur_);
        return take().text;
    }

    Statement statement() {
        if (keyword("get")) return Statement{query()};
        if (keyword("if")) return Statement{branch()};
        if (keyword("do")) return Statement{action()};
        Lexer::fail("expected 'get', 'if' or 'do'" + describe(), cur_);
    }

    Query query() {
        expect_keyword("get");
        Query q;
        expect(Tok::LParen, "'('");
        do {
            Binding b;
            b.attribute = name("attribute name");
            expect(Tok::Colon, "':'");
            if (cur_.kind == Tok::Star) {
                take();
            } else {
                b.variable = name("variable name or '*'");
            }
            q.bindings.push_back(std::move(b));
        } while (cur_.kind == Tok::Comma && (take(), true));
        expect(Tok::RParen, "')'");
        expect_keyword("from");
        do {
            ClassRef ref;
            ref.sequence.push_back(name("class name"));
            while (cur_.kind == Tok::Dot) {
                take();
                ref.sequence.push_back(name("class name"));
            }
            q.classes.push_back(std::move(ref));
        } while (cur_.kind == Tok::Comma && (take(), true));
        if (keyword("where")) {
            take();
            q.where.push_back(condition());
            while (cur_.kind == Tok::LParen) q.where.push_back(condition());
        }
        expect(Tok::Semi, "';'");
        return q;
    }

    Branch branch() {
        expect_keyword("if");
        Branch b;
        b.conditions.push_back(condition());
        while (cur_.kind == Tok::LParen) b.conditions.push_back(condition());
        b.then_block = block();
        if (keyword("else")) {
            take();
            b.else_block = block();
        }
        return b;
    }

    std::vector<Statement> block() {
        expect(Tok::LBrace, "'{'");
        std::vector<Statement> out;
        while (cur_.kind != Tok::RBrace) {
            if (cur_.kind == Tok::End) Lexer::fail("unterminated block", cur_);
            out.push_back(statement());
        }
        take();
        return out;
    }

    Action action() {
        expect_keyword("do");
        Action a;
        a.name = name("action name");
        expect(Tok::LParen, "'('");
        if (cur_.kind != Tok::RParen) {
            a.operands.push_back(operand());
            while (cur_.kind == Tok::Comma) {
                take();
                a.operands.push_back(operand());
            }
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return a;
    }

    Condition condition() {
        expect(Tok::LParen, "'('");
        Condition c;
        c.lhs = operand();
        Token op = expect(Tok::Cmp, "comparison operator");
        if (op.text == "=") c.op = CompareOp::Eq;
        else if (op.text == "!=") c.op = CompareOp::Ne;
        else if (op.text == "<") c.op = CompareOp::Lt;
        else if (op.text == ">") c.op = CompareOp::Gt;
        else if (op.text == "<=") c.op = CompareOp::Le;
        else if (op.text == ">=") c.op = CompareOp::Ge;
        else Lexer::fail("unknown operator '" + op.text + "'", op);
        c.rhs = operand();
        expect(Tok::RParen, "')'");
        return c;
    }

    Operand operand() {
        Token t = cur_;
        switch (t.kind) {
            case Tok::Int: {
                take();
                std::int64_t v = 0;
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
                if (ec != std::errc()) Lexer::fail("integer literal out of range", t);
                return Operand::literal(Value::integer(v));
            }
            case Tok::Decimal: take(); return Operand::literal(parse_cell(t.text, Tag::Decimal));
            case Tok::String: take(); return Operand::literal(Value::str(t.text));
            case Tok::Date: take(); return Operand::literal(Value::date(*Date::parse(t.text)));
            case Tok::Ident: {
                if (iequals(t.text, "null")) {
                    take();
                    return Operand::literal(Value::null());
                }
                std::string var = name("variable");
                DateField field = DateField::None;
                if (cur_.kind == Tok::Dot) {
                    take();
                    Token f = expect(Tok::Ident, "date field");
                    if (iequals(f.text, "year")) field = DateField::Year;
                    else if (iequals(f.text, "month")) field = DateField::Month;
                    else if (iequals(f.text, "day")) field = DateField::Day;
                    else Lexer::fail("unknown date field '" + f.text + "'", f);
                }
                return Operand::variable(std::move(var), field);
            }
            default: Lexer::fail("expected operand" + describe(), t);
        }
    }

    Lexer lex_;
    Token cur_;
};

}  // namespace

Protocol Protocol::parse(std::string_view text) {
    Parser parser(text);
    return from_statements(parser.protocol());
}

}  // namespace semproto
