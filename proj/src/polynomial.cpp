#include "mlh/polynomial.hpp"

#include "mlh/rational.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace mlh {

Polynomial Polynomial::constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Expo(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int k) {
    Polynomial p(nvars);
    Expo e(nvars, 0);
    e[k] = 1;
    p.add_term(e, 1.0);
    return p;
}

bool Polynomial::is_constant() const {
    for (const auto& [e, c] : terms_)
        for (int x : e)
            if (x) return false;
    return true;
}

double Polynomial::constant_value() const {
    if (terms_.empty()) return 0.0;
    return terms_.begin()->second;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int t = 0;
        for (int x : e) t += x;
        d = std::max(d, t);
    }
    return d;
}

void Polynomial::add_term(const Expo& e, double c) {
    if (c == 0.0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Polynomial operator+(const Polynomial& x, const Polynomial& y) {
    Polynomial r = x;
    for (const auto& [e, c] : y.terms_) r.add_term(e, c);
    return r;
}

Polynomial operator-(const Polynomial& x, const Polynomial& y) {
    Polynomial r = x;
    for (const auto& [e, c] : y.terms_) r.add_term(e, -c);
    return r;
}

Polynomial operator*(const Polynomial& x, const Polynomial& y) {
    Polynomial r(x.nvars_);
    for (const auto& [ex, cx] : x.terms_)
        for (const auto& [ey, cy] : y.terms_) {
            Polynomial::Expo e(x.nvars_);
            for (int k = 0; k < x.nvars_; ++k) e[k] = ex[k] + ey[k];
            r.add_term(e, cx * cy);
        }
    return r;
}

Polynomial Polynomial::times(double c) const {
    Polynomial r(nvars_);
    for (const auto& [e, coef] : terms_) r.add_term(e, coef * c);
    return r;
}

Polynomial Polynomial::pow(int e) const {
    Polynomial r = Polynomial::constant(nvars_, 1.0);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
}

Polynomial Polynomial::derivative(int k) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[k] == 0) continue;
        Expo de = e;
        de[k] -= 1;
        r.add_term(de, c * e[k]);
    }
    return r;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        os << std::abs(c);
        for (int k = 0; k < nvars_; ++k) {
            if (!e[k]) continue;
            os << "*u" << (k + 1);
            if (e[k] > 1) os << "^" << e[k];
        }
    }
    return os.str();
}

namespace {

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    int nvars;
    double sigma;

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw domain_error("polynomial parse error at offset " + std::to_string(pos) + ": " + what);
    }

    Polynomial parse_expr() {
        Polynomial acc = parse_term();
        for (;;) {
            if (eat('+')) acc = acc + parse_term();
            else if (eat('-')) acc = acc - parse_term();
            else return acc;
        }
    }

    Polynomial parse_term() {
        Polynomial acc = parse_factor();
        for (;;) {
            if (eat('*')) acc = acc * parse_factor();
            else if (eat('/')) {
                Polynomial d = parse_factor();
                if (!d.is_constant() || d.constant_value() == 0.0)
                    fail("division only by nonzero constants");
                acc = acc.times(1.0 / d.constant_value());
            } else
                return acc;
        }
    }

    Polynomial parse_factor() {
        Polynomial base = parse_base();
        skip_ws();
        if (eat('^')) {
            skip_ws();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            if (start == pos) fail("integer exponent expected");
            base = base.pow(std::stoi(s.substr(start, pos - start)));
        }
        return base;
    }

    Polynomial parse_base() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            Polynomial inner = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (c == '-') { ++pos; return -parse_factor(); }
        if (std::isdigit((unsigned char)c) || c == '.') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit((unsigned char)s[pos]) || s[pos] == '.' || s[pos] == 'e' ||
                    s[pos] == 'E' ||
                    ((s[pos] == '+' || s[pos] == '-') && (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
                ++pos;
            return Polynomial::constant(nvars, std::stod(s.substr(start, pos - start)));
        }
        if (std::isalpha((unsigned char)c)) {
            std::size_t start = pos;
            while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_')) ++pos;
            std::string id = s.substr(start, pos - start);
            if (id == "sigma") return Polynomial::constant(nvars, sigma);
            if (id.size() > 1 && id[0] == 'u') {
                int k = std::stoi(id.substr(1));
                if (k < 1 || k > nvars) fail("variable " + id + " out of range");
                return Polynomial::variable(nvars, k - 1);
            }
            fail("unknown identifier '" + id + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

Polynomial parse_polynomial(const std::string& text, int nvars, double sigma_value) {
    Parser p{text, 0, nvars, sigma_value};
    Polynomial result = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return result;
}

} // namespace mlh
