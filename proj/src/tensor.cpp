#include "weylab/geom/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

int ipow(int b, int e) {
    int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Runs fn over all multi-indices of the given rank with entries in [0, dim).
template <typename Fn>
void for_each_index(int dim, int rank, Fn&& fn) {
    std::vector<int> idx(rank, 0);
    for (;;) {
        fn(std::span<const int>(idx));
        int k = rank - 1;
        while (k >= 0 && ++idx[k] == dim) idx[k--] = 0;
        if (k < 0) break;
    }
}

int permutation_sign(std::span<const int> perm) {
    int inv = 0;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

void check_valence(const TensorField& t, int contra, int cov, const char* what) {
    if (!t.valid()) throw ShapeError(std::string(what) + ": empty tensor");
    if (t.contra() != contra || t.cov() != cov)
        throw ShapeError(std::string(what) + ": unexpected tensor valence");
}

TensorField sym_or_alt(const TensorField& t, bool covariant, std::span<const int> slots,
                       bool alternating) {
    if (!t.valid()) throw ShapeError("symmetrize: empty tensor");
    const int block = covariant ? t.cov() : t.contra();
    const int base = covariant ? t.contra() : 0;
    const int k = static_cast<int>(slots.size());
    for (int s : slots)
        if (s < 0 || s >= block) throw ShapeError("symmetrize: slot out of range");
    if (k < 2) return t;
    double norm = 1.0;
    for (int i = 2; i <= k; ++i) norm *= i;
    TensorField out(t.chart(), t.contra(), t.cov(), t.weight());
    const int dim = t.dim();
    for_each_index(dim, t.rank(), [&](std::span<const int> idx) {
        std::vector<int> vals(k);
        for (int i = 0; i < k; ++i) vals[i] = idx[base + slots[i]];
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        ScalarField acc = ScalarField::constant(dim, 0.0);
        std::vector<int> src(idx.begin(), idx.end());
        do {
            for (int i = 0; i < k; ++i) src[base + slots[i]] = vals[perm[i]];
            ScalarField term = t.at(src);
            if (alternating && permutation_sign(perm) < 0) term = -term;
            acc = acc + term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.at(idx) = acc / norm;
    });
    return out;
}

// Laplace expansion along the first row of an n x n ScalarField matrix.
ScalarField det_rec(const std::vector<std::vector<ScalarField>>& m, std::vector<int> cols,
                    int row, int dim) {
    const int n = static_cast<int>(cols.size());
    if (n == 1) return m[row][cols[0]];
    ScalarField acc = ScalarField::constant(dim, 0.0);
    for (int j = 0; j < n; ++j) {
        const ScalarField& pivot = m[row][cols[j]];
        if (pivot.is_zero()) continue;
        std::vector<int> sub;
        sub.reserve(n - 1);
        for (int k = 0; k < n; ++k)
            if (k != j) sub.push_back(cols[k]);
        ScalarField minor = det_rec(m, std::move(sub), row + 1, dim);
        ScalarField term = pivot * minor;
        acc = (j & 1) ? acc - term : acc + term;
    }
    return acc;
}

std::vector<std::vector<ScalarField>> as_matrix(const TensorField& g) {
    const int n = g.dim();
    std::vector<std::vector<ScalarField>> m(n, std::vector<ScalarField>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = g.at({i, j});
    return m;
}

}  // namespace

TensorField::TensorField(ChartPtr chart, int contra, int cov, Rational weight)
    : chart_(std::move(chart)), contra_(contra), cov_(cov), weight_(weight) {
    if (contra < 0 || cov < 0) throw ShapeError("tensor: negative valence");
    comps_.assign(ipow(dim(), rank()), ScalarField::constant(dim(), 0.0));
}

TensorField TensorField::scalar(ChartPtr chart, ScalarField f, Rational weight) {
    TensorField t(std::move(chart), 0, 0, weight);
    if (f.dim() != t.dim()) throw ShapeError("tensor: scalar field dimension mismatch");
    t.comps_[0] = std::move(f);
    return t;
}

TensorField TensorField::build(ChartPtr chart, int contra, int cov, Rational weight,
                               const std::function<ScalarField(std::span<const int>)>& gen) {
    TensorField t(std::move(chart), contra, cov, weight);
    for_each_index(t.dim(), t.rank(),
                   [&](std::span<const int> idx) { t.at(idx) = gen(idx); });
    return t;
}

int TensorField::flat(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank())
        throw ShapeError("tensor: index rank mismatch");
    int f = 0;
    for (int v : idx) {
        if (v < 0 || v >= dim()) throw ShapeError("tensor: index out of range");
        f = f * dim() + v;
    }
    return f;
}

void TensorField::unflat(int flat_index, std::span<int> idx) const {
    for (int k = rank() - 1; k >= 0; --k) {
        idx[k] = flat_index % dim();
        flat_index /= dim();
    }
}

TensorField TensorField::operator-() const {
    TensorField r = *this;
    for (auto& c : r.comps_) c = -c;
    return r;
}

TensorField operator+(const TensorField& a, const TensorField& b) {
    if (a.chart_ != b.chart_ || a.contra_ != b.contra_ || a.cov_ != b.cov_)
        throw ShapeError("tensor: addition of incompatible tensors");
    if (!(a.weight_ == b.weight_))
        throw ShapeError("tensor: addition of different density weights");
    TensorField r = a;
    for (size_t i = 0; i < r.comps_.size(); ++i) r.comps_[i] = r.comps_[i] + b.comps_[i];
    return r;
}

TensorField operator-(const TensorField& a, const TensorField& b) { return a + (-b); }

TensorField operator*(const TensorField& a, double s) {
    TensorField r = a;
    for (auto& c : r.comps_) c = c * s;
    return r;
}

TensorField operator*(const TensorField& a, const TensorField& s) {
    if (s.rank() != 0) {
        if (a.rank() == 0) return s * a;
        throw ShapeError("tensor: componentwise product needs a rank-0 factor");
    }
    if (a.chart_ != s.chart_) throw ShapeError("tensor: product across charts");
    TensorField r(a.chart_, a.contra_, a.cov_, a.weight_ + s.weight_);
    for (size_t i = 0; i < r.comps_.size(); ++i) r.comps_[i] = a.comps_[i] * s.comps_[0];
    return r;
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
    if (!a.valid() || !b.valid()) throw ShapeError("tensor_product: empty operand");
    if (a.chart() != b.chart()) throw ShapeError("tensor_product: operands on different charts");
    TensorField r(a.chart(), a.contra() + b.contra(), a.cov() + b.cov(),
                  a.weight() + b.weight());
    std::vector<int> ia(a.rank()), ib(b.rank());
    for_each_index(r.dim(), r.rank(), [&](std::span<const int> idx) {
        int p = 0;
        for (int k = 0; k < a.contra(); ++k) ia[k] = idx[p++];
        for (int k = 0; k < b.contra(); ++k) ib[k] = idx[p++];
        for (int k = 0; k < a.cov(); ++k) ia[a.contra() + k] = idx[p++];
        for (int k = 0; k < b.cov(); ++k) ib[b.contra() + k] = idx[p++];
        r.at(idx) = a.at(ia) * b.at(ib);
    });
    return r;
}

TensorField contract(const TensorField& t, int up, int down) {
    if (!t.valid()) throw ShapeError("contract: empty tensor");
    if (up < 0 || up >= t.contra() || down < 0 || down >= t.cov())
        throw ShapeError("contract: slot out of range");
    TensorField r(t.chart(), t.contra() - 1, t.cov() - 1, t.weight());
    const int dim = t.dim();
    std::vector<int> src(t.rank());
    for_each_index(dim, r.rank(), [&](std::span<const int> idx) {
        ScalarField acc = ScalarField::constant(dim, 0.0);
        for (int m = 0; m < dim; ++m) {
            int p = 0;
            for (int k = 0; k < t.contra(); ++k)
                src[k] = (k == up) ? m : idx[p++];
            for (int k = 0; k < t.cov(); ++k)
                src[t.contra() + k] = (k == down) ? m : idx[p++];
            acc = acc + t.at(src);
        }
        r.at(idx) = acc;
    });
    return r;
}

TensorField symmetrize(const TensorField& t, bool covariant, std::span<const int> slots) {
    return sym_or_alt(t, covariant, slots, false);
}

TensorField alternate(const TensorField& t, bool covariant, std::span<const int> slots) {
    return sym_or_alt(t, covariant, slots, true);
}

ScalarField det_form(const TensorField& g) {
    if (!g.valid() || g.rank() != 2 || (g.contra() != 0 && g.cov() != 0))
        throw ShapeError("det_form: expects a rank-2 single-variance tensor");
    std::vector<int> cols(g.dim());
    std::iota(cols.begin(), cols.end(), 0);
    return det_rec(as_matrix(g), std::move(cols), 0, g.dim());
}

TensorField inverse_form(const TensorField& g) {
    check_valence(g, 0, 2, "inverse_form");
    if (!g.weight().is_zero())
        throw ShapeError("inverse_form: only weight-zero forms are invertible here");
    const int n = g.dim();
    ScalarField det = guard_nonzero(det_form(g), 1e-12, "inverse_form: form is singular");
    auto m = as_matrix(g);
    TensorField inv(g.chart(), 2, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // inv^{ij} = cofactor(j, i) / det
            std::vector<int> cols;
            for (int c = 0; c < n; ++c)
                if (c != i) cols.push_back(c);
            std::vector<std::vector<ScalarField>> minor;
            for (int r = 0; r < n; ++r)
                if (r != j) minor.push_back(m[r]);
            ScalarField cof = det_rec(minor, cols, 0, n);
            if ((i + j) & 1) cof = -cof;
            inv.at({i, j}) = cof / det;
        }
    }
    return inv;
}

TensorField lower_index(const TensorField& t, int up, const TensorField& g) {
    check_valence(g, 0, 2, "lower_index");
    if (!t.valid() || up < 0 || up >= t.contra())
        throw ShapeError("lower_index: slot out of range");
    TensorField r(t.chart(), t.contra() - 1, t.cov() + 1, t.weight() + g.weight());
    const int dim = t.dim();
    std::vector<int> src(t.rank());
    for_each_index(dim, r.rank(), [&](std::span<const int> idx) {
        // idx layout: remaining contra, then (a, original cov)
        const int a = idx[r.contra()];
        ScalarField acc = ScalarField::constant(dim, 0.0);
        for (int m = 0; m < dim; ++m) {
            int p = 0;
            for (int k = 0; k < t.contra(); ++k) src[k] = (k == up) ? m : idx[p++];
            ++p;  // skip the new covariant slot a
            for (int k = 0; k < t.cov(); ++k) src[t.contra() + k] = idx[p++];
            acc = acc + g.at({a, m}) * t.at(src);
        }
        r.at(idx) = acc;
    });
    return r;
}

TensorField raise_index(const TensorField& t, int down, const TensorField& g) {
    TensorField ginv = inverse_form(g);
    if (!t.valid() || down < 0 || down >= t.cov())
        throw ShapeError("raise_index: slot out of range");
    TensorField r(t.chart(), t.contra() + 1, t.cov() - 1, t.weight());
    const int dim = t.dim();
    std::vector<int> src(t.rank());
    for_each_index(dim, r.rank(), [&](std::span<const int> idx) {
        // idx layout: (a, original contra), then remaining cov
        const int a = idx[0];
        ScalarField acc = ScalarField::constant(dim, 0.0);
        for (int m = 0; m < dim; ++m) {
            int p = 1;
            for (int k = 0; k < t.contra(); ++k) src[k] = idx[p++];
            for (int k = 0; k < t.cov(); ++k)
                src[t.contra() + k] = (k == down) ? m : idx[p++];
            acc = acc + ginv.at({a, m}) * t.at(src);
        }
        r.at(idx) = acc;
    });
    return r;
}

TensorField partial_derivative(const TensorField& t) {
    if (!t.valid()) throw ShapeError("partial_derivative: empty tensor");
    TensorField r(t.chart(), t.contra(), t.cov() + 1, t.weight());
    std::vector<int> src(t.rank());
    for_each_index(t.dim(), r.rank(), [&](std::span<const int> idx) {
        const int a = idx[t.contra()];
        int p = 0;
        for (int k = 0; k < t.contra(); ++k) src[k] = idx[p++];
        ++p;
        for (int k = 0; k < t.cov(); ++k) src[t.contra() + k] = idx[p++];
        r.at(idx) = t.at(src).derivative(a);
    });
    return r;
}

TensorField covariant_derivative(const TensorField& t, const TensorField& gamma) {
    check_valence(gamma, 1, 2, "covariant_derivative: connection");
    if (!t.valid()) throw ShapeError("covariant_derivative: empty tensor");
    if (t.chart() != gamma.chart())
        throw ShapeError("covariant_derivative: tensor and connection on different charts");
    const int dim = t.dim();
    TensorField r = partial_derivative(t);
    // Precompute the trace Gamma^k_{ka} for the density term.
    std::vector<ScalarField> gtr;
    if (!t.weight().is_zero()) {
        gtr.reserve(dim);
        for (int a = 0; a < dim; ++a) {
            ScalarField acc = ScalarField::constant(dim, 0.0);
            for (int k = 0; k < dim; ++k) acc = acc + gamma.at({k, k, a});
            gtr.push_back(acc);
        }
    }
    const double wfrac = (t.weight() / Rational(dim + 1)).as_double();
    std::vector<int> src(t.rank());
    for_each_index(dim, r.rank(), [&](std::span<const int> idx) {
        const int a = idx[t.contra()];
        int p = 0;
        for (int k = 0; k < t.contra(); ++k) src[k] = idx[p++];
        ++p;
        for (int k = 0; k < t.cov(); ++k) src[t.contra() + k] = idx[p++];
        ScalarField acc = r.at(idx);
        for (int slot = 0; slot < t.contra(); ++slot) {
            const int i = src[slot];
            std::vector<int> s2(src.begin(), src.end());
            for (int m = 0; m < dim; ++m) {
                s2[slot] = m;
                acc = acc + gamma.at({i, a, m}) * t.at(s2);
            }
        }
        for (int slot = 0; slot < t.cov(); ++slot) {
            const int j = src[t.contra() + slot];
            std::vector<int> s2(src.begin(), src.end());
            for (int m = 0; m < dim; ++m) {
                s2[t.contra() + slot] = m;
                acc = acc - gamma.at({m, a, j}) * t.at(s2);
            }
        }
        if (!t.weight().is_zero()) acc = acc + wfrac * gtr[a] * t.at(src);
        r.at(idx) = acc;
    });
    return r;
}

std::vector<double> eval_components(const TensorField& t, BatchEvaluator& ev) {
    std::vector<double> out(t.size());
    for (int i = 0; i < t.size(); ++i) out[i] = ev.eval(t.component(i));
    return out;
}

std::vector<double> eval_components(const TensorField& t, std::span<const double> p) {
    BatchEvaluator ev(std::vector<double>(p.begin(), p.end()));
    return eval_components(t, ev);
}

Eigen::MatrixXd eval_matrix(const TensorField& t, BatchEvaluator& ev) {
    if (t.rank() != 2) throw ShapeError("eval_matrix: expects a rank-2 tensor");
    const int n = t.dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = ev.eval(t.component(i * n + j));
    return m;
}

Eigen::MatrixXd eval_matrix(const TensorField& t, std::span<const double> p) {
    BatchEvaluator ev(std::vector<double>(p.begin(), p.end()));
    return eval_matrix(t, ev);
}

double max_abs(const TensorField& t, BatchEvaluator& ev) {
    double m = 0.0;
    for (int i = 0; i < t.size(); ++i) m = std::max(m, std::abs(ev.eval(t.component(i))));
    return m;
}

double max_abs(const TensorField& t, std::span<const double> p) {
    BatchEvaluator ev(std::vector<double>(p.begin(), p.end()));
    return max_abs(t, ev);
}

}  // namespace weylab
