#include "affrep/rational.hpp"

#include "affrep/error.hpp"

#include <cctype>

namespace affrep {

std::string to_string(const Rational& q) { return q.get_str(10); }

namespace {

bool is_integer_literal(std::string_view s, bool allow_sign) {
    if (!s.empty() && allow_sign && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    const auto den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    if (!is_integer_literal(num, true) ||
        (slash != std::string_view::npos && !is_integer_literal(den, false))) {
        throw ParseError("malformed rational '" + std::string(text) + "'");
    }
    std::string n(num);
    if (n.front() == '+') n.erase(0, 1);
    Rational q;
    if (slash == std::string_view::npos) {
        q = Rational(mpz_class(n, 10));
    } else {
        mpz_class d(std::string(den), 10);
        if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        q = Rational(mpz_class(n, 10), d);
        q.canonicalize();
    }
    return q;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace affrep
