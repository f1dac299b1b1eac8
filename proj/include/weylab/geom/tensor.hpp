#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "weylab/geom/chart.hpp"

namespace weylab {

// A tensor field of valence (contra, cov) and rational density weight on a
// chart, stored as a dense array of scalar expression fields. Component
// layout: all contravariant slots first, then all covariant slots, row-major.
//
// Density convention: weight-w objects transform with the w-th power of a
// fixed reference volume scale; their coordinate derivative picks up the
// correction term (w/(n+1)) * Gamma^k_{ka} under a covariant derivative.
class TensorField {
public:
    TensorField() = default;
    TensorField(ChartPtr chart, int contra, int cov, Rational weight = Rational(0));

    static TensorField scalar(ChartPtr chart, ScalarField f, Rational weight = Rational(0));
    // Builds components from a generator called with each multi-index.
    static TensorField build(ChartPtr chart, int contra, int cov, Rational weight,
                             const std::function<ScalarField(std::span<const int>)>& gen);

    bool valid() const { return chart_ != nullptr; }
    const ChartPtr& chart() const { return chart_; }
    int dim() const { return chart_->dim(); }
    int contra() const { return contra_; }
    int cov() const { return cov_; }
    int rank() const { return contra_ + cov_; }
    Rational weight() const { return weight_; }
    int size() const { return static_cast<int>(comps_.size()); }

    const ScalarField& at(std::span<const int> idx) const { return comps_[flat(idx)]; }
    ScalarField& at(std::span<const int> idx) { return comps_[flat(idx)]; }
    const ScalarField& at(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }
    ScalarField& at(std::initializer_list<int> idx) {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }
    const ScalarField& component(int flat_index) const { return comps_[flat_index]; }
    ScalarField& component(int flat_index) { return comps_[flat_index]; }

    int flat(std::span<const int> idx) const;
    // Inverse of flat(): writes the multi-index for a flat position.
    void unflat(int flat_index, std::span<int> idx) const;

    TensorField operator-() const;
    friend TensorField operator+(const TensorField& a, const TensorField& b);
    friend TensorField operator-(const TensorField& a, const TensorField& b);
    friend TensorField operator*(const TensorField& a, double s);
    friend TensorField operator*(double s, const TensorField& a) { return a * s; }
    // Scalar-field multiple; weights add.
    friend TensorField operator*(const TensorField& a, const TensorField& s);

private:
    ChartPtr chart_;
    int contra_ = 0, cov_ = 0;
    Rational weight_;
    std::vector<ScalarField> comps_;
};

// --- algebra ---------------------------------------------------------------

// Result slots: a's contravariant, b's contravariant, a's covariant, b's
// covariant. Weights add.
TensorField tensor_product(const TensorField& a, const TensorField& b);

// Contracts contravariant slot `up` against covariant slot `down`
// (positions within their own variance blocks).
TensorField contract(const TensorField& t, int up, int down);

// Symmetrization / alternation over slots within one variance block, with the
// usual 1/k! normalization. `covariant` selects the block; `slots` are
// positions within it.
TensorField symmetrize(const TensorField& t, bool covariant, std::span<const int> slots);
TensorField alternate(const TensorField& t, bool covariant, std::span<const int> slots);
inline TensorField symmetrize(const TensorField& t, bool covariant,
                              std::initializer_list<int> slots) {
    return symmetrize(t, covariant, std::span<const int>(slots.begin(), slots.size()));
}
inline TensorField alternate(const TensorField& t, bool covariant,
                             std::initializer_list<int> slots) {
    return alternate(t, covariant, std::span<const int>(slots.begin(), slots.size()));
}

// Symbolic determinant (Laplace expansion) of a (0,2) or (2,0) tensor.
ScalarField det_form(const TensorField& g);

// Symbolic inverse of a weight-zero (0,2) form as a (2,0) tensor (adjugate
// over determinant, determinant guarded: SingularFormError near zero).
TensorField inverse_form(const TensorField& g);

// Lower contravariant slot `up` with the (0,2) form g; the new covariant slot
// becomes the first covariant slot. Raise uses inverse_form(g) likewise.
TensorField lower_index(const TensorField& t, int up, const TensorField& g);
TensorField raise_index(const TensorField& t, int down, const TensorField& g);

// Coordinate derivative d_a T, new covariant slot first; no connection terms.
TensorField partial_derivative(const TensorField& t);

// Covariant derivative with respect to a (1,2) connection field gamma; the
// new covariant slot is the first covariant slot of the result. Includes the
// density correction (w/(n+1)) Gamma^k_{ka} T for weighted tensors.
TensorField covariant_derivative(const TensorField& t, const TensorField& gamma);

// --- pointwise evaluation --------------------------------------------------

// All components at a point (flat layout order), sharing one expansion cache.
std::vector<double> eval_components(const TensorField& t, std::span<const double> p);
std::vector<double> eval_components(const TensorField& t, BatchEvaluator& ev);

// Rank-2 tensor as a dim x dim matrix (first slot = row).
Eigen::MatrixXd eval_matrix(const TensorField& t, std::span<const double> p);
Eigen::MatrixXd eval_matrix(const TensorField& t, BatchEvaluator& ev);

// Largest |component| at a point; the workhorse of residual checks.
double max_abs(const TensorField& t, std::span<const double> p);
double max_abs(const TensorField& t, BatchEvaluator& ev);

}  // namespace weylab
