#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hitkernel/monomials.hpp"

namespace hitkernel {

/// Homogeneous-or-not polynomial over F2 as a set of monomials; adding a
/// monomial twice removes it.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(const ExponentTuple& m)
        : terms_{m}
    {
    }

    /// Terms may repeat; repeated terms cancel in pairs.
    static Polynomial from_terms(std::vector<ExponentTuple> terms)
    {
        Polynomial p;
        p.terms_ = std::move(terms);
        p.normalize();
        return p;
    }

    std::span<const ExponentTuple> terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool contains(const ExponentTuple& m) const { return std::ranges::binary_search(terms_, m); }

    /// Degree of the (first) term; callers check homogeneity separately.
    unsigned degree() const noexcept { return terms_.empty() ? 0 : terms_.front().degree(); }

    bool is_homogeneous() const noexcept
    {
        return std::ranges::all_of(terms_, [&](const ExponentTuple& t) { return t.degree() == degree(); });
    }

    Polynomial& operator+=(const Polynomial& other)
    {
        std::vector<ExponentTuple> out;
        out.reserve(terms_.size() + other.terms_.size());
        std::ranges::set_symmetric_difference(terms_, other.terms_, std::back_inserter(out));
        terms_ = std::move(out);
        return *this;
    }

    Polynomial& operator+=(const ExponentTuple& m) { return *this += Polynomial(m); }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        std::vector<ExponentTuple> prod;
        prod.reserve(a.size() * b.size());
        for (const auto& x : a.terms_)
            for (const auto& y : b.terms_) {
                require(x.size() == y.size(), ErrorKind::invalid_argument,
                        "product of polynomials in different variable counts");
                ExponentTuple z(x.size());
                for (int i = 0; i < x.size(); ++i)
                    z.set(i, x[i] + y[i]);
                prod.push_back(z);
            }
        return from_terms(std::move(prod));
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void normalize()
    {
        std::ranges::sort(terms_);
        std::vector<ExponentTuple> out;
        out.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size();) {
            std::size_t j = i;
            while (j < terms_.size() && terms_[j] == terms_[i])
                ++j;
            if ((j - i) % 2 == 1)
                out.push_back(terms_[i]);
            i = j;
        }
        terms_ = std::move(out);
    }

    std::vector<ExponentTuple> terms_;  // sorted, unique
};

namespace detail {

// Cartan recursion: Sq^k(x_j^e M') = sum_i C(e, i) x_j^(e+i) Sq^(k-i)(M').
// By Lucas, C(e, i) is odd iff i is a bit-submask of e, and distinct i give
// distinct monomials, so the expansion never cancels.
template <class F>
void square_terms(unsigned k, ExponentTuple& m, int var, F& emit)
{
    const int q = m.size();
    while (var < q && m[var] == 0)
        ++var;
    if (var == q) {
        if (k == 0)
            emit(static_cast<const ExponentTuple&>(m));
        return;
    }
    if (k == 0) {
        emit(static_cast<const ExponentTuple&>(m));
        return;
    }
    const unsigned e = m[var];
    // submasks of e in increasing order, capped at k
    for (unsigned i = 0; i <= k; i = (i - e) & e) {
        m.set(var, e + i);
        square_terms(k - i, m, var + 1, emit);
        m.set(var, e);
        if (i == e)
            break;
    }
}

}  // namespace detail

/// Calls f(term) for every monomial in the support of Sq^k(m).
template <class F>
void for_each_square_term(unsigned k, const ExponentTuple& m, F&& f)
{
    if (k > m.degree())
        return;
    ExponentTuple work = m;
    detail::square_terms(k, work, 0, f);
}

inline Polynomial sq_on_monomial(unsigned k, const ExponentTuple& m)
{
    std::vector<ExponentTuple> terms;
    for_each_square_term(k, m, [&](const ExponentTuple& t) { terms.push_back(t); });
    return Polynomial::from_terms(std::move(terms));
}

inline Polynomial sq(unsigned k, const Polynomial& f)
{
    std::vector<ExponentTuple> terms;
    for (const auto& m : f.terms())
        for_each_square_term(k, m, [&](const ExponentTuple& t) { terms.push_back(t); });
    return Polynomial::from_terms(std::move(terms));
}

/// Support of Sq^k(x^b), sorted by exponent vector.
inline std::vector<ExponentTuple> hit_column(const ExponentTuple& b, unsigned k)
{
    std::vector<ExponentTuple> out;
    for_each_square_term(k, b, [&](const ExponentTuple& t) { out.push_back(t); });
    std::ranges::sort(out);
    return out;
}

// Text form: monomials joined by " + ", each x1^a1*...*xq^aq with unit
// exponents and zero factors omitted; "1" for the constant, "0" for zero.

inline std::string to_string(const ExponentTuple& m, std::string_view var)
{
    std::string s;
    for (int i = 0; i < m.size(); ++i) {
        if (m[i] == 0)
            continue;
        if (!s.empty())
            s += '*';
        s += var;
        s += std::to_string(i + 1);
        if (m[i] != 1) {
            s += '^';
            s += std::to_string(m[i]);
        }
    }
    return s.empty() ? "1" : s;
}

inline std::string to_string(const Polynomial& p)
{
    if (p.is_zero())
        return "0";
    std::string s;
    for (const auto& m : p.terms()) {
        if (!s.empty())
            s += " + ";
        s += to_string(m, "x");
    }
    return s;
}

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view text, int q, int line)
        : text_(text), q_(q), line_(line)
    {
    }

    std::vector<ExponentTuple> parse()
    {
        std::vector<ExponentTuple> terms;
        skip_space();
        if (at_end())
            return terms;
        for (;;) {
            auto m = monomial();
            if (m)
                terms.push_back(*m);
            skip_space();
            if (at_end())
                break;
            expect('+');
            skip_space();
            if (at_end())
                break;  // trailing '+' continues on the next line
        }
        return terms;
    }

private:
    std::optional<ExponentTuple> monomial()
    {
        ExponentTuple m(q_);
        skip_space();
        if (peek() == '0') {
            ++pos_;
            return std::nullopt;
        }
        if (peek() == '1') {
            ++pos_;
            return m;
        }
        for (;;) {
            skip_space();
            expect('x');
            if (peek() == '_')
                ++pos_;
            bool braced = peek() == '{';
            if (braced)
                ++pos_;
            unsigned var = number();
            if (braced)
                expect('}');
            if (var < 1 || var > static_cast<unsigned>(q_))
                error("variable index out of range");
            unsigned e = 1;
            skip_space();
            if (peek() == '^') {
                ++pos_;
                bool b = peek() == '{';
                if (b)
                    ++pos_;
                e = number();
                if (b)
                    expect('}');
            }
            m.set(static_cast<int>(var) - 1, m[static_cast<int>(var) - 1] + e);
            skip_space();
            if (peek() == '*') {
                ++pos_;
                continue;
            }
            if (peek() == 'x')
                continue;
            return m;
        }
    }

    unsigned number()
    {
        std::size_t start = pos_;
        unsigned v = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + static_cast<unsigned>(text_[pos_] - '0');
            if (v > 65535)
                error("number too large");
            ++pos_;
        }
        if (pos_ == start)
            error("expected a number");
        return v;
    }

    void skip_space()
    {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    bool at_end() const { return pos_ >= text_.size(); }

    void expect(char c)
    {
        if (peek() != c)
            error(std::string("expected '") + c + "'");
        ++pos_;
    }

    [[noreturn]] void error(const std::string& what) const
    {
        fail(ErrorKind::parse, "line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) +
                                   ": " + what);
    }

    std::string_view text_;
    int q_;
    int line_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the text form; also accepts x_{i}^{e} and juxtaposed factors.
inline Polynomial parse_polynomial(std::string_view text, int q, int line = 1)
{
    return Polynomial::from_terms(detail::PolyParser(text, q, line).parse());
}

struct PolynomialFile {
    int q = 0;
    unsigned n = 0;
    Polynomial poly;
};

/// Reads a polynomial file: header "q=<q> n=<n>", then terms over any
/// number of lines, '+'-separated or one per line; '#' starts a comment.
inline PolynomialFile read_polynomial(std::istream& in)
{
    PolynomialFile out;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::vector<ExponentTuple> terms;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (!have_header) {
            int q = 0;
            unsigned n = 0;
            char tail = 0;
            if (std::sscanf(line.c_str(), " q=%d n=%u %c", &q, &n, &tail) != 2 || q < 1 || q > kMaxVariables)
                fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": expected header \"q=<q> n=<n>\"");
            out.q = q;
            out.n = n;
            have_header = true;
            continue;
        }
        auto part = detail::PolyParser(line, out.q, lineno).parse();
        terms.insert(terms.end(), part.begin(), part.end());
    }
    if (!have_header)
        fail(ErrorKind::parse, "missing header \"q=<q> n=<n>\"");
    out.poly = Polynomial::from_terms(std::move(terms));
    for (const auto& m : out.poly.terms())
        if (m.degree() != out.n)
            fail(ErrorKind::parse, "monomial " + to_string(m, "x") + " has degree " + std::to_string(m.degree()) +
                                       ", header says " + std::to_string(out.n));
    return out;
}

inline PolynomialFile read_polynomial_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open " + path);
    return read_polynomial(in);
}

inline void write_polynomial(std::ostream& os, int q, unsigned n, const Polynomial& p)
{
    os << "q=" << q << " n=" << n << '\n';
    for (const auto& m : p.terms())
        os << to_string(m, "x") << '\n';
}

}  // namespace hitkernel
