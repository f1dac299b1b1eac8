#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "weylab/jet/jet.hpp"

namespace weylab {

class FieldNode;

// An evaluable scalar expression over the coordinates of an n-dimensional
// chart. Fields are immutable value types backed by a shared expression DAG;
// evaluation is pure and thread-safe. Jet evaluation returns the truncated
// Taylor expansion at a point; derivatives are exact (forward-mode truncated
// series arithmetic), finite differences appear only in test oracles.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(std::shared_ptr<const FieldNode> node) : node_(std::move(node)) {}

    bool valid() const { return node_ != nullptr; }
    int dim() const;

    static ScalarField constant(int dim, double v);
    static ScalarField coordinate(int dim, int var);

    Jet eval_jet(std::span<const double> point, int order) const;
    double eval(std::span<const double> point) const;

    // Exact partial derivative d/dx_var as a new field.
    ScalarField derivative(int var) const;

    // View this field (on m variables) as a field on new_dim variables that
    // reads input i from coordinate var_map[i].
    ScalarField embed(int new_dim, std::span<const int> var_map) const;

    // Substitution: outer(inner_1(x),...,inner_p(x)).
    static ScalarField compose(const ScalarField& outer, std::vector<ScalarField> inner);

    // Structural constant value, if the node is literally a constant.
    std::optional<double> constant_value() const;
    bool is_zero() const;

    ScalarField operator-() const;
    friend ScalarField operator+(const ScalarField&, const ScalarField&);
    friend ScalarField operator-(const ScalarField&, const ScalarField&);
    friend ScalarField operator*(const ScalarField&, const ScalarField&);
    friend ScalarField operator/(const ScalarField&, const ScalarField&);
    friend ScalarField operator+(const ScalarField& a, double s);
    friend ScalarField operator+(double s, const ScalarField& a) { return a + s; }
    friend ScalarField operator-(const ScalarField& a, double s) { return a + (-s); }
    friend ScalarField operator-(double s, const ScalarField& a);
    friend ScalarField operator*(const ScalarField& a, double s);
    friend ScalarField operator*(double s, const ScalarField& a) { return a * s; }
    friend ScalarField operator/(const ScalarField& a, double s) { return a * (1.0 / s); }
    friend ScalarField operator/(double s, const ScalarField& a);

    const std::shared_ptr<const FieldNode>& node() const { return node_; }

private:
    std::shared_ptr<const FieldNode> node_;
};

// Evaluates many fields at one shared point, reusing the expansion cache
// across calls so that common subexpressions (shared DAG nodes) are expanded
// only once. Used by tensor evaluation, where components overlap heavily.
class BatchEvaluator {
public:
    explicit BatchEvaluator(std::vector<double> point);
    ~BatchEvaluator();
    BatchEvaluator(const BatchEvaluator&) = delete;
    BatchEvaluator& operator=(const BatchEvaluator&) = delete;

    Jet eval_jet(const ScalarField& f, int order);
    double eval(const ScalarField& f) { return eval_jet(f, 0).value(); }
    const std::vector<double>& point() const { return point_; }

private:
    struct Impl;
    std::vector<double> point_;
    std::unique_ptr<Impl> impl_;
};

ScalarField sqrt(const ScalarField& f);
ScalarField exp(const ScalarField& f);
ScalarField log(const ScalarField& f);
ScalarField pow_int(const ScalarField& f, int k);

// Wraps f so that evaluation throws SingularFormError when |f| falls below
// `floor` at the evaluation point. Used to flag singular raise/lower forms.
ScalarField guard_nonzero(const ScalarField& f, double floor, const char* what);

}  // namespace weylab
