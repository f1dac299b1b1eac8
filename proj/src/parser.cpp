#include "weylab/field/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

class Parser {
public:
    Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

    ScalarField run() {
        ScalarField f = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    std::string_view src_;
    int dim_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression: " + msg + " at position " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ScalarField expr() {
        ScalarField f = term();
        for (;;) {
            if (eat('+')) f = f + term();
            else if (eat('-')) f = f - term();
            else return f;
        }
    }

    ScalarField term() {
        ScalarField f = unary();
        for (;;) {
            if (eat('*')) f = f * unary();
            else if (eat('/')) f = f / unary();
            else return f;
        }
    }

    ScalarField unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    ScalarField power() {
        ScalarField f = atom();
        while (eat('^')) f = pow_int(f, exponent());
        return f;
    }

    int exponent() {
        skip_ws();
        bool neg = false;
        if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
            neg = src_[pos_] == '-';
            ++pos_;
        }
        size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected an integer exponent after '^'");
        int k = 0;
        std::from_chars(src_.data() + start, src_.data() + pos_, k);
        return neg ? -k : k;
    }

    ScalarField atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ScalarField f = expr();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    ScalarField number() {
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<size_t>(end - begin);
        return ScalarField::constant(dim_, v);
    }

    ScalarField identifier() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (name.size() >= 2 && name[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
            int idx = 0;
            auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
            if (ec == std::errc() && p == name.data() + name.size()) {
                if (idx < 1 || idx > dim_) {
                    pos_ = start;
                    fail("coordinate index out of range for this chart");
                }
                return ScalarField::coordinate(dim_, idx - 1);
            }
        }
        if (name == "sqrt" || name == "exp" || name == "log") {
            if (!eat('(')) fail("expected '(' after function name");
            ScalarField arg = expr();
            if (!eat(')')) fail("expected ')'");
            if (name == "sqrt") return sqrt(arg);
            if (name == "exp") return exp(arg);
            return log(arg);
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }
};

}  // namespace

ScalarField parse_field(std::string_view src, int dim) {
    if (dim < 1) throw ShapeError("expression: chart dimension must be positive");
    return Parser(src, dim).run();
}

}  // namespace weylab
