#include "weylab/jet/jet.hpp"

#include <cassert>
#include <cmath>

#include "weylab/errors.hpp"
#include "weylab/jet/kernels.hpp"

namespace weylab {

Jet Jet::constant(const JetLayout& layout, double v) {
    Jet j(layout);
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(const JetLayout& layout, int var, double value) {
    Jet j(layout);
    j.c_[0] = value;
    if (layout.order() >= 1) j.c_[1 + var] = 1.0;
    return j;
}

Jet Jet::operator-() const {
    Jet r(*layout_);
    for (int i = 0; i < size(); ++i) r.c_[i] = -c_[i];
    return r;
}

Jet& Jet::operator+=(const Jet& rhs) {
    assert(layout_ == rhs.layout_);
    for (int i = 0; i < size(); ++i) c_[i] += rhs.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
    assert(layout_ == rhs.layout_);
    for (int i = 0; i < size(); ++i) c_[i] -= rhs.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    assert(a.layout_ == b.layout_);
    const JetLayout& L = *a.layout_;
    Jet r(L);
    kernels::jet_mul()(L.mul_offsets().data(), L.mul_pairs().data(), L.size(),
                       a.c_.data(), b.c_.data(), r.c_.data());
    return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }

Jet Jet::compose_univariate(std::span<const double> raw_derivs) const {
    const JetLayout& L = *layout_;
    const int k = L.order();
    assert(static_cast<int>(raw_derivs.size()) >= k + 1);
    // w = this - value(); evaluate sum_p f^(p)(u0)/p! w^p by Horner.
    Jet w = *this;
    w.c_[0] = 0.0;
    double fact = 1.0;
    std::vector<double> taylor(k + 1);
    for (int p = 0; p <= k; ++p) {
        if (p > 0) fact *= p;
        taylor[p] = raw_derivs[p] / fact;
    }
    Jet r = Jet::constant(L, taylor[k]);
    for (int p = k - 1; p >= 0; --p) {
        r = r * w;
        r.c_[0] += taylor[p];
    }
    return r;
}

Jet Jet::reciprocal() const {
    const double u0 = value();
    if (u0 == 0.0) throw DomainError("jet: division by zero");
    const int k = layout_->order();
    std::vector<double> d(k + 1);
    // d^p/du^p (1/u) = (-1)^p p! u^{-p-1}
    double cur = 1.0 / u0;  // p! u^{-p-1} with alternating sign folded in
    for (int p = 0; p <= k; ++p) {
        d[p] = cur;
        cur *= -static_cast<double>(p + 1) / u0;
    }
    return compose_univariate(d);
}

Jet Jet::derivative(int var) const {
    const JetLayout& L = *layout_;
    if (L.order() == 0) throw OrderError("jet: derivative of order-0 jet");
    const JetLayout& Lo = JetLayout::get(L.dim(), L.order() - 1);
    Jet r(Lo);
    for (int i = 0; i < Lo.size(); ++i) {
        const int src = L.shift_up(L.index_of(Lo.exponent(i)), var);
        const int ev = Lo.exponent(i)[var];
        r[i] = c_[src] * (ev + 1);
    }
    return r;
}

Jet Jet::truncated(int order) const {
    const JetLayout& L = *layout_;
    if (order > L.order()) throw OrderError("jet: truncation to higher order");
    const JetLayout& Lo = JetLayout::get(L.dim(), order);
    Jet r(Lo);
    for (int i = 0; i < Lo.size(); ++i) r[i] = c_[L.index_of(Lo.exponent(i))];
    return r;
}

Jet Jet::compose(const Jet& outer, std::span<const Jet> inner) {
    const JetLayout& Lout = outer.layout();
    const int p = Lout.dim();
    assert(static_cast<int>(inner.size()) == p);
    const JetLayout& L = inner[0].layout();
    // Shifted inner jets w_v = g_v - g_v(x0).
    std::vector<Jet> w(inner.begin(), inner.end());
    for (Jet& j : w) j[0] = 0.0;
    // Powers w_v^e, built on demand.
    std::vector<std::vector<Jet>> pw(p);
    for (int v = 0; v < p; ++v) pw[v].push_back(Jet::constant(L, 1.0));
    auto power = [&](int v, int e) -> const Jet& {
        while (static_cast<int>(pw[v].size()) <= e)
            pw[v].push_back(pw[v].back() * w[v]);
        return pw[v][e];
    };
    Jet r(L);
    for (int i = 0; i < Lout.size(); ++i) {
        const double a = outer[i];
        if (a == 0.0) continue;
        auto alpha = Lout.exponent(i);
        Jet term = Jet::constant(L, a);
        for (int v = 0; v < p; ++v)
            if (alpha[v] > 0) term = term * power(v, alpha[v]);
        r += term;
    }
    return r;
}

Jet sqrt(const Jet& u) {
    const double u0 = u.value();
    if (u0 <= 0.0) throw DomainError("jet: sqrt of non-positive value");
    const int k = u.layout().order();
    std::vector<double> d(k + 1);
    // d^p/du^p sqrt(u) = sqrt(u) * prod_{j=0}^{p-1} (1/2 - j) / u^p
    double cur = std::sqrt(u0);
    for (int p = 0; p <= k; ++p) {
        d[p] = cur;
        cur *= (0.5 - p) / u0;
    }
    return u.compose_univariate(d);
}

Jet exp(const Jet& u) {
    const int k = u.layout().order();
    std::vector<double> d(static_cast<size_t>(k) + 1, std::exp(u.value()));
    return u.compose_univariate(d);
}

Jet log(const Jet& u) {
    const double u0 = u.value();
    if (u0 <= 0.0) throw DomainError("jet: log of non-positive value");
    const int k = u.layout().order();
    std::vector<double> d(k + 1);
    d[0] = std::log(u0);
    // d^p/du^p log(u) = (-1)^{p-1} (p-1)! u^{-p}
    double cur = 1.0 / u0;
    for (int p = 1; p <= k; ++p) {
        d[p] = cur;
        cur *= -static_cast<double>(p) / u0;
    }
    return u.compose_univariate(d);
}

Jet pow_int(const Jet& u, int k) {
    if (k == 0) return Jet::constant(u.layout(), 1.0);
    const bool neg = k < 0;
    unsigned e = neg ? static_cast<unsigned>(-(long long)k) : static_cast<unsigned>(k);
    Jet base = u;
    Jet acc = Jet::constant(u.layout(), 1.0);
    while (e > 0) {
        if (e & 1u) acc = acc * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return neg ? acc.reciprocal() : acc;
}

}  // namespace weylab
