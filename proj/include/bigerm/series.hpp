#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "bigerm/rational.hpp"

namespace bigerm {

enum class Var : unsigned char { t1 = 1, t2 = 2 };

inline const char* var_name(Var v) { return v == Var::t1 ? "t1" : "t2"; }

// Exponents above this are treated as "exact to infinity". Truncation
// arithmetic saturates here instead of overflowing.
constexpr int kExactTrunc = 1 << 22;

int trunc_add(int a, int b);

// Truncated univariate power series over Q. Coefficients of exponents <= trunc
// are exact; nothing is known above. Zero coefficients are never stored.
class UniSeries {
   public:
    UniSeries() : var_(Var::t1), trunc_(kExactTrunc) {}
    explicit UniSeries(Var v, int trunc = kExactTrunc) : var_(v), trunc_(trunc) {}

    static UniSeries monomial(Var v, const Rat& c, int exp, int trunc = kExactTrunc);
    static UniSeries variable(Var v, int trunc = kExactTrunc) { return monomial(v, Rat(1), 1, trunc); }
    static UniSeries zero(Var v, int trunc = kExactTrunc) { return UniSeries(v, trunc); }

    Var var() const { return var_; }
    int trunc() const { return trunc_; }
    bool is_exact() const { return trunc_ >= kExactTrunc; }
    const std::map<int, Rat>& terms() const { return coef_; }
    bool is_zero() const { return coef_.empty(); }  // zero up to trunc (exact zero if is_exact())

    // Least exponent with nonzero coefficient; nullopt = zero up to truncation.
    std::optional<int> order() const;
    // order() for nonzero-series contexts where vanishing is a caller bug.
    int order_or_throw(const char* what) const;

    Rat coeff(int exp) const;
    Rat leading_coeff() const;  // requires nonzero
    void set_coeff(int exp, const Rat& c);  // respects trunc, drops zeros

    UniSeries truncated(int new_trunc) const;  // tightens trunc, drops high terms

    friend UniSeries operator+(const UniSeries& a, const UniSeries& b);
    friend UniSeries operator-(const UniSeries& a, const UniSeries& b);
    friend UniSeries operator*(const UniSeries& a, const UniSeries& b);
    UniSeries operator-() const;
    bool operator==(const UniSeries& o) const { return var_ == o.var_ && coef_ == o.coef_ && trunc_ == o.trunc_; }

    std::string to_string() const;

   private:
    Var var_;
    int trunc_;
    std::map<int, Rat> coef_;
};

UniSeries scale(const UniSeries& s, const Rat& c);
UniSeries derive(const UniSeries& s);
UniSeries power(const UniSeries& s, int n);

// dst += c * src in place (the saturation workhorse).
void add_scaled(UniSeries& dst, const UniSeries& src, const Rat& c);

// s with the variable renamed; series are otherwise variable-agnostic.
UniSeries retag(const UniSeries& s, Var v);

// Exact division by c*t^p; requires order(s) >= p (termwise exponent shift).
UniSeries divide_monomial(const UniSeries& s, const Rat& c, int p);

// s(rho(t)) for ord(rho) = 1. Errors otherwise.
UniSeries reparametrize(const UniSeries& s, const UniSeries& rho);

// sigma with rho(sigma(t)) = sigma(rho(t)) = t up to truncation.
// Requires ord(rho) = 1 with nonzero linear coefficient.
UniSeries compositional_inverse(const UniSeries& rho);

// 1/u for a unit u (nonzero constant term).
UniSeries unit_inverse(const UniSeries& u);

// r with r^n = u, for a unit u with constant term 1. Exact over Q.
UniSeries unit_nth_root(const UniSeries& u, int n);

// Time-1 flow of the vector field eps(t) d/dt, ord(eps) >= 2: the
// reparametrization t + eps + eps*eps'/2 + ... Exact; terminates because each
// Lie iterate gains at least one order.
UniSeries flow_reparametrization(const UniSeries& eps);

// Truncated bivariate polynomial over Q in x, y. Monomials of total degree
// <= deg_bound are exact; nothing is known above.
class BiPoly {
   public:
    using Key = std::pair<int, int>;  // (x exponent, y exponent)

    BiPoly() : deg_bound_(kExactTrunc) {}
    explicit BiPoly(int deg_bound) : deg_bound_(deg_bound) {}

    static BiPoly monomial(const Rat& c, int a, int b, int deg_bound = kExactTrunc);
    static BiPoly var_x() { return monomial(Rat(1), 1, 0); }
    static BiPoly var_y() { return monomial(Rat(1), 0, 1); }

    int deg_bound() const { return deg_bound_; }
    const std::map<Key, Rat>& terms() const { return coef_; }
    bool is_zero() const { return coef_.empty(); }
    bool is_exact() const { return deg_bound_ >= kExactTrunc; }

    // Least total degree of a stored term; nullopt when zero.
    std::optional<int> min_degree() const;
    int max_degree() const;  // of stored terms; 0 when zero

    Rat coeff(int a, int b) const;
    void set_coeff(int a, int b, const Rat& c);

    BiPoly truncated(int new_bound) const;

    friend BiPoly operator+(const BiPoly& a, const BiPoly& b);
    friend BiPoly operator-(const BiPoly& a, const BiPoly& b);
    friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
    BiPoly operator-() const;
    bool operator==(const BiPoly& o) const { return coef_ == o.coef_ && deg_bound_ == o.deg_bound_; }

    std::string to_string() const;

   private:
    int deg_bound_;
    std::map<Key, Rat> coef_;
};

BiPoly scale(const BiPoly& p, const Rat& c);
BiPoly d_dx(const BiPoly& p);
BiPoly d_dy(const BiPoly& p);

// p(x(t), y(t)). Components must share a variable tag and have order >= 1
// (or be zero). Truncation tracks both the series truncs and p's degree bound.
UniSeries compose_bipoly(const BiPoly& p, const UniSeries& x, const UniSeries& y);

// p(u(x,y), v(x,y)) for substitutions with min degree >= 1.
BiPoly compose_bipoly_pair(const BiPoly& p, const BiPoly& u, const BiPoly& v);

// Inverse automorphism: tau with sigma(tau) = tau(sigma) = id, for sigma =
// (sx, sy) with invertible linear part and no constant terms.
std::pair<BiPoly, BiPoly> plane_inverse(const BiPoly& sx, const BiPoly& sy, int deg_bound);

// Coordinate images of the time-1 flow of eta1 d/dx + eta2 d/dy, where the
// linear parts of eta are at most the y d/dx direction and everything else has
// degree >= 2. Returns (sigma_x, sigma_y), a local automorphism.
std::pair<BiPoly, BiPoly> flow_plane_automorphism(const BiPoly& eta1, const BiPoly& eta2, int deg_bound);

}  // namespace bigerm
