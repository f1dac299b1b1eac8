#include "weylab/field/expr.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

struct EvalContext;

// Root of one evaluation: owns one memoization context per expansion point,
// so nodes shared across an expression DAG (and across sub-evaluations
// triggered by embeddings/compositions) are expanded at most once per order.
struct Evaluator {
    std::map<std::vector<double>, std::unique_ptr<EvalContext>> pool;
    EvalContext& context_for(std::vector<double> point);
};

}  // namespace

class FieldNode {
public:
    explicit FieldNode(int dim) : dim_(dim) {}
    virtual ~FieldNode() = default;
    int dim() const { return dim_; }
    virtual Jet eval(EvalContext& ctx, int order) const = 0;

private:
    int dim_;
};

namespace {

using NodePtr = std::shared_ptr<const FieldNode>;

struct CacheKey {
    const FieldNode* node;
    int order;
    bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
    size_t operator()(const CacheKey& k) const {
        return std::hash<const void*>()(k.node) * 31u + static_cast<size_t>(k.order);
    }
};

struct EvalContext {
    Evaluator* root;
    std::vector<double> point;
    // The cached entry keeps a reference to its node: keys are addresses, and
    // a freed node's address could otherwise be recycled by a new allocation
    // and alias a stale entry while the evaluator outlives the expression.
    struct Entry {
        NodePtr pin;
        Jet jet;
    };
    std::unordered_map<CacheKey, Entry, CacheKeyHash> cache;

    Jet eval(const NodePtr& n, int order) {
        CacheKey key{n.get(), order};
        if (auto it = cache.find(key); it != cache.end()) return it->second.jet;
        Jet j = n->eval(*this, order);
        cache.emplace(key, Entry{n, j});
        return j;
    }
};

EvalContext& Evaluator::context_for(std::vector<double> point) {
    auto it = pool.find(point);
    if (it == pool.end()) {
        auto ctx = std::make_unique<EvalContext>();
        ctx->root = this;
        ctx->point = point;
        it = pool.emplace(std::move(point), std::move(ctx)).first;
    }
    return *it->second;
}

// ---------------------------------------------------------------------------
// Node types
// ---------------------------------------------------------------------------

class ConstNode final : public FieldNode {
public:
    ConstNode(int dim, double v) : FieldNode(dim), v_(v) {}
    double value() const { return v_; }
    Jet eval(EvalContext&, int order) const override {
        return Jet::constant(JetLayout::get(dim(), order), v_);
    }

private:
    double v_;
};

class CoordNode final : public FieldNode {
public:
    CoordNode(int dim, int var) : FieldNode(dim), var_(var) {
        if (var < 0 || var >= dim) throw ShapeError("field: coordinate index out of range");
    }
    Jet eval(EvalContext& ctx, int order) const override {
        return Jet::variable(JetLayout::get(dim(), order), var_, ctx.point[var_]);
    }

private:
    int var_;
};

enum class BinOp { Add, Sub, Mul, Div };

class BinNode final : public FieldNode {
public:
    BinNode(BinOp op, NodePtr a, NodePtr b)
        : FieldNode(a->dim()), op_(op), a_(std::move(a)), b_(std::move(b)) {}
    Jet eval(EvalContext& ctx, int order) const override {
        Jet ja = ctx.eval(a_, order);
        Jet jb = ctx.eval(b_, order);
        switch (op_) {
            case BinOp::Add: return ja + jb;
            case BinOp::Sub: return ja - jb;
            case BinOp::Mul: return ja * jb;
            case BinOp::Div: return ja / jb;
        }
        return ja;
    }

private:
    BinOp op_;
    NodePtr a_, b_;
};

class NegNode final : public FieldNode {
public:
    explicit NegNode(NodePtr a) : FieldNode(a->dim()), a_(std::move(a)) {}
    Jet eval(EvalContext& ctx, int order) const override { return -ctx.eval(a_, order); }

private:
    NodePtr a_;
};

enum class UnaryFn { Sqrt, Exp, Log };

class FnNode final : public FieldNode {
public:
    FnNode(UnaryFn fn, NodePtr a) : FieldNode(a->dim()), fn_(fn), a_(std::move(a)) {}
    Jet eval(EvalContext& ctx, int order) const override {
        Jet j = ctx.eval(a_, order);
        switch (fn_) {
            case UnaryFn::Sqrt: return weylab::sqrt(j);
            case UnaryFn::Exp: return weylab::exp(j);
            case UnaryFn::Log: return weylab::log(j);
        }
        return j;
    }

private:
    UnaryFn fn_;
    NodePtr a_;
};

class PowIntNode final : public FieldNode {
public:
    PowIntNode(NodePtr a, int k) : FieldNode(a->dim()), a_(std::move(a)), k_(k) {}
    Jet eval(EvalContext& ctx, int order) const override {
        return weylab::pow_int(ctx.eval(a_, order), k_);
    }

private:
    NodePtr a_;
    int k_;
};

class DerivNode final : public FieldNode {
public:
    DerivNode(NodePtr a, int var) : FieldNode(a->dim()), a_(std::move(a)), var_(var) {
        if (var < 0 || var >= dim()) throw ShapeError("field: derivative index out of range");
    }
    Jet eval(EvalContext& ctx, int order) const override {
        if (order + 1 > JetLayout::kMaxOrder)
            throw OrderError("field: derivative nesting exceeds the supported jet order");
        return ctx.eval(a_, order + 1).derivative(var_);
    }

private:
    NodePtr a_;
    int var_;
};

class EmbedNode final : public FieldNode {
public:
    EmbedNode(NodePtr a, int new_dim, std::vector<int> var_map)
        : FieldNode(new_dim), a_(std::move(a)), var_map_(std::move(var_map)) {
        if (static_cast<int>(var_map_.size()) != a_->dim())
            throw ShapeError("field: embed map size must equal the operand dimension");
        for (int v : var_map_)
            if (v < 0 || v >= new_dim)
                throw ShapeError("field: embed map entry out of range");
    }
    Jet eval(EvalContext& ctx, int order) const override {
        std::vector<double> sub(a_->dim());
        for (size_t i = 0; i < sub.size(); ++i) sub[i] = ctx.point[var_map_[i]];
        Jet inner = ctx.root->context_for(std::move(sub)).eval(a_, order);
        const JetLayout& Li = inner.layout();
        const JetLayout& Lo = JetLayout::get(dim(), order);
        Jet out(Lo);
        std::vector<int> beta(dim());
        for (int i = 0; i < Li.size(); ++i) {
            if (inner[i] == 0.0) continue;
            auto alpha = Li.exponent(i);
            std::fill(beta.begin(), beta.end(), 0);
            for (size_t v = 0; v < var_map_.size(); ++v) beta[var_map_[v]] += alpha[v];
            out[Lo.index_of(beta)] += inner[i];
        }
        return out;
    }

private:
    NodePtr a_;
    std::vector<int> var_map_;
};

class ComposeNode final : public FieldNode {
public:
    ComposeNode(NodePtr outer, std::vector<NodePtr> inner)
        : FieldNode(inner.at(0)->dim()), outer_(std::move(outer)), inner_(std::move(inner)) {
        if (static_cast<int>(inner_.size()) != outer_->dim())
            throw ShapeError("field: composition arity must equal the outer dimension");
        for (const auto& g : inner_)
            if (g->dim() != dim())
                throw ShapeError("field: composition arguments live on different dimensions");
    }
    Jet eval(EvalContext& ctx, int order) const override {
        std::vector<Jet> gj;
        gj.reserve(inner_.size());
        std::vector<double> u(inner_.size());
        for (size_t i = 0; i < inner_.size(); ++i) {
            gj.push_back(ctx.eval(inner_[i], order));
            u[i] = gj.back().value();
        }
        Jet fo = ctx.root->context_for(std::move(u)).eval(outer_, order);
        return Jet::compose(fo, gj);
    }

private:
    NodePtr outer_;
    std::vector<NodePtr> inner_;
};

class GuardNode final : public FieldNode {
public:
    GuardNode(NodePtr a, double floor, std::string what)
        : FieldNode(a->dim()), a_(std::move(a)), floor_(floor), what_(std::move(what)) {}
    Jet eval(EvalContext& ctx, int order) const override {
        Jet j = ctx.eval(a_, order);
        if (std::abs(j.value()) < floor_) throw SingularFormError(what_);
        return j;
    }

private:
    NodePtr a_;
    double floor_;
    std::string what_;
};

std::optional<double> const_of(const NodePtr& n) {
    if (auto* c = dynamic_cast<const ConstNode*>(n.get())) return c->value();
    return std::nullopt;
}

ScalarField wrap(NodePtr n) { return ScalarField(std::move(n)); }

void check_same_dim(const ScalarField& a, const ScalarField& b) {
    if (!a.valid() || !b.valid()) throw ShapeError("field: operation on an empty field");
    if (a.dim() != b.dim())
        throw ShapeError("field: operands live on different dimensions");
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarField API
// ---------------------------------------------------------------------------

int ScalarField::dim() const { return node_->dim(); }

ScalarField ScalarField::constant(int dim, double v) {
    return wrap(std::make_shared<ConstNode>(dim, v));
}

ScalarField ScalarField::coordinate(int dim, int var) {
    return wrap(std::make_shared<CoordNode>(dim, var));
}

Jet ScalarField::eval_jet(std::span<const double> point, int order) const {
    if (!valid()) throw ShapeError("field: evaluating an empty field");
    if (static_cast<int>(point.size()) != dim())
        throw ShapeError("field: point dimension mismatch");
    if (order < 0 || order > 4)
        throw OrderError("field: jet order must be between 0 and 4");
    Evaluator ev;
    return ev.context_for(std::vector<double>(point.begin(), point.end()))
        .eval(node_, order);
}

double ScalarField::eval(std::span<const double> point) const {
    return eval_jet(point, 0).value();
}

std::optional<double> ScalarField::constant_value() const {
    if (!valid()) return std::nullopt;
    return const_of(node_);
}

bool ScalarField::is_zero() const {
    auto c = constant_value();
    return c.has_value() && *c == 0.0;
}

ScalarField ScalarField::derivative(int var) const {
    if (!valid()) throw ShapeError("field: derivative of an empty field");
    if (constant_value()) return constant(dim(), 0.0);
    return wrap(std::make_shared<DerivNode>(node_, var));
}

ScalarField ScalarField::embed(int new_dim, std::span<const int> var_map) const {
    if (!valid()) throw ShapeError("field: embedding an empty field");
    if (auto c = constant_value()) return constant(new_dim, *c);
    return wrap(std::make_shared<EmbedNode>(
        node_, new_dim, std::vector<int>(var_map.begin(), var_map.end())));
}

ScalarField ScalarField::compose(const ScalarField& outer, std::vector<ScalarField> inner) {
    if (!outer.valid() || inner.empty())
        throw ShapeError("field: composition needs an outer field and arguments");
    if (auto c = outer.constant_value()) return constant(inner[0].dim(), *c);
    std::vector<NodePtr> nodes;
    nodes.reserve(inner.size());
    for (auto& g : inner) {
        if (!g.valid()) throw ShapeError("field: composition argument is empty");
        nodes.push_back(g.node());
    }
    return wrap(std::make_shared<ComposeNode>(outer.node(), std::move(nodes)));
}

ScalarField ScalarField::operator-() const {
    if (auto c = constant_value()) return constant(dim(), -*c);
    return wrap(std::make_shared<NegNode>(node_));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    check_same_dim(a, b);
    auto ca = a.constant_value(), cb = b.constant_value();
    if (ca && cb) return ScalarField::constant(a.dim(), *ca + *cb);
    if (ca && *ca == 0.0) return b;
    if (cb && *cb == 0.0) return a;
    return wrap(std::make_shared<BinNode>(BinOp::Add, a.node(), b.node()));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    check_same_dim(a, b);
    auto ca = a.constant_value(), cb = b.constant_value();
    if (ca && cb) return ScalarField::constant(a.dim(), *ca - *cb);
    if (cb && *cb == 0.0) return a;
    if (ca && *ca == 0.0) return -b;
    return wrap(std::make_shared<BinNode>(BinOp::Sub, a.node(), b.node()));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    check_same_dim(a, b);
    auto ca = a.constant_value(), cb = b.constant_value();
    if (ca && cb) return ScalarField::constant(a.dim(), *ca * *cb);
    if ((ca && *ca == 0.0) || (cb && *cb == 0.0))
        return ScalarField::constant(a.dim(), 0.0);
    if (ca && *ca == 1.0) return b;
    if (cb && *cb == 1.0) return a;
    return wrap(std::make_shared<BinNode>(BinOp::Mul, a.node(), b.node()));
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    check_same_dim(a, b);
    auto ca = a.constant_value(), cb = b.constant_value();
    if (cb) {
        if (*cb == 0.0) throw DomainError("field: division by the zero constant");
        if (ca) return ScalarField::constant(a.dim(), *ca / *cb);
        return a * (1.0 / *cb);
    }
    if (ca && *ca == 0.0) return ScalarField::constant(a.dim(), 0.0);
    return wrap(std::make_shared<BinNode>(BinOp::Div, a.node(), b.node()));
}

ScalarField operator+(const ScalarField& a, double s) {
    if (!a.valid()) throw ShapeError("field: operation on an empty field");
    return a + ScalarField::constant(a.dim(), s);
}

ScalarField operator-(double s, const ScalarField& a) {
    if (!a.valid()) throw ShapeError("field: operation on an empty field");
    return ScalarField::constant(a.dim(), s) - a;
}

ScalarField operator*(const ScalarField& a, double s) {
    if (!a.valid()) throw ShapeError("field: operation on an empty field");
    return a * ScalarField::constant(a.dim(), s);
}

ScalarField operator/(double s, const ScalarField& a) {
    if (!a.valid()) throw ShapeError("field: operation on an empty field");
    return ScalarField::constant(a.dim(), s) / a;
}

struct BatchEvaluator::Impl {
    Evaluator ev;
};

BatchEvaluator::BatchEvaluator(std::vector<double> point)
    : point_(std::move(point)), impl_(std::make_unique<Impl>()) {}

BatchEvaluator::~BatchEvaluator() = default;

Jet BatchEvaluator::eval_jet(const ScalarField& f, int order) {
    if (!f.valid()) throw ShapeError("field: evaluating an empty field");
    if (static_cast<int>(point_.size()) != f.dim())
        throw ShapeError("field: point dimension mismatch");
    if (order < 0 || order > 4)
        throw OrderError("field: jet order must be between 0 and 4");
    return impl_->ev.context_for(point_).eval(f.node(), order);
}

ScalarField sqrt(const ScalarField& f) {
    if (auto c = f.constant_value(); c && *c > 0.0)
        return ScalarField::constant(f.dim(), std::sqrt(*c));
    return wrap(std::make_shared<FnNode>(UnaryFn::Sqrt, f.node()));
}

ScalarField exp(const ScalarField& f) {
    if (auto c = f.constant_value())
        return ScalarField::constant(f.dim(), std::exp(*c));
    return wrap(std::make_shared<FnNode>(UnaryFn::Exp, f.node()));
}

ScalarField log(const ScalarField& f) {
    if (auto c = f.constant_value(); c && *c > 0.0)
        return ScalarField::constant(f.dim(), std::log(*c));
    return wrap(std::make_shared<FnNode>(UnaryFn::Log, f.node()));
}

ScalarField pow_int(const ScalarField& f, int k) {
    if (k == 0) return ScalarField::constant(f.dim(), 1.0);
    if (k == 1) return f;
    if (auto c = f.constant_value(); c && (*c != 0.0 || k > 0))
        return ScalarField::constant(f.dim(), std::pow(*c, k));
    return wrap(std::make_shared<PowIntNode>(f.node(), k));
}

ScalarField guard_nonzero(const ScalarField& f, double floor, const char* what) {
    return wrap(std::make_shared<GuardNode>(f.node(), floor, what));
}

}  // namespace weylab
