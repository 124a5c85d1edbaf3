#include "drsr/expression.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace drsr {

namespace {

// %.17g round-trips any double exactly.
std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool well_formed(const std::vector<Node>& nodes) {
    if (nodes.empty()) return false;
    // A prefix sequence is a single complete tree iff the slot count reaches
    // zero exactly at the end.
    int need = 1;
    for (const Node& n : nodes) {
        if (need <= 0) return false;
        need += arity(n.kind) - 1;
    }
    return need == 0;
}

} // namespace

ExpressionTree::ExpressionTree(std::vector<Node> preorder) : nodes_(std::move(preorder)) {
    if (!well_formed(nodes_)) throw std::invalid_argument("malformed prefix node sequence");
}

ExpressionTree ExpressionTree::variable(int index, double weight) {
    ExpressionTree t;
    t.nodes_.push_back(Node{NodeKind::Var, static_cast<std::uint8_t>(index), weight});
    return t;
}

ExpressionTree ExpressionTree::constant_one(double weight) {
    ExpressionTree t;
    t.nodes_.push_back(Node{NodeKind::Const1, 0, weight});
    return t;
}

ExpressionTree ExpressionTree::unary(NodeKind op, const ExpressionTree& child, double weight) {
    assert(arity(op) == 1);
    ExpressionTree t;
    t.nodes_.reserve(child.nodes_.size() + 1);
    t.nodes_.push_back(Node{op, 0, weight});
    t.nodes_.insert(t.nodes_.end(), child.nodes_.begin(), child.nodes_.end());
    return t;
}

ExpressionTree ExpressionTree::binary(NodeKind op, const ExpressionTree& lhs,
                                      const ExpressionTree& rhs, double weight) {
    assert(arity(op) == 2);
    ExpressionTree t;
    t.nodes_.reserve(lhs.nodes_.size() + rhs.nodes_.size() + 1);
    t.nodes_.push_back(Node{op, 0, weight});
    t.nodes_.insert(t.nodes_.end(), lhs.nodes_.begin(), lhs.nodes_.end());
    t.nodes_.insert(t.nodes_.end(), rhs.nodes_.begin(), rhs.nodes_.end());
    return t;
}

int ExpressionTree::depth() const {
    int max_depth = 0;
    std::vector<int> open; // remaining child slots per open ancestor
    for (const Node& n : nodes_) {
        max_depth = std::max(max_depth, static_cast<int>(open.size()));
        if (const int a = arity(n.kind); a > 0) {
            open.push_back(a);
        } else {
            while (!open.empty()) {
                if (--open.back() == 0)
                    open.pop_back();
                else
                    break;
            }
        }
    }
    return max_depth;
}

int ExpressionTree::transcendental_count() const {
    int c = 0;
    for (const Node& n : nodes_)
        if (is_transcendental(n.kind)) ++c;
    return c;
}

int ExpressionTree::max_var_index() const {
    int m = -1;
    for (const Node& n : nodes_)
        if (n.kind == NodeKind::Var) m = std::max(m, static_cast<int>(n.var));
    return m;
}

int ExpressionTree::subtree_end(int pos) const {
    int end = pos;
    int need = 1;
    while (need > 0) {
        need += arity(nodes_[static_cast<std::size_t>(end)].kind) - 1;
        ++end;
    }
    return end;
}

ExpressionTree ExpressionTree::subtree(int pos) const {
    const int end = subtree_end(pos);
    ExpressionTree t;
    t.nodes_.assign(nodes_.begin() + pos, nodes_.begin() + end);
    return t;
}

ExpressionTree ExpressionTree::with_replaced_subtree(int pos, const ExpressionTree& replacement) const {
    const int end = subtree_end(pos);
    ExpressionTree t;
    t.nodes_.reserve(nodes_.size() - static_cast<std::size_t>(end - pos) + replacement.nodes_.size());
    t.nodes_.insert(t.nodes_.end(), nodes_.begin(), nodes_.begin() + pos);
    t.nodes_.insert(t.nodes_.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    t.nodes_.insert(t.nodes_.end(), nodes_.begin() + end, nodes_.end());
    return t;
}

std::vector<double> ExpressionTree::weights_vector() const {
    std::vector<double> w;
    w.reserve(nodes_.size());
    for (const Node& n : nodes_) w.push_back(n.weight);
    return w;
}

void ExpressionTree::set_weights(std::span<const double> weights) {
    if (weights.size() != nodes_.size())
        throw std::invalid_argument("weight vector length does not match node count");
    for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].weight = weights[i];
}

ExpressionTree ExpressionTree::with_weights(std::span<const double> weights) const {
    ExpressionTree t(*this);
    t.set_weights(weights);
    return t;
}

EvalOutcome ExpressionTree::evaluate(std::span<const double> x) const {
    const int n = node_count();
    double local[64];
    std::vector<double> heap;
    double* st = local;
    if (n > 64) {
        heap.resize(static_cast<std::size_t>(n));
        st = heap.data();
    }
    int top = 0;
    // Backward scan over the prefix array evaluates children before parents.
    for (int i = n - 1; i >= 0; --i) {
        const Node& nd = nodes_[static_cast<std::size_t>(i)];
        double v;
        switch (nd.kind) {
        case NodeKind::Var:
            assert(nd.var < x.size());
            v = nd.weight * x[nd.var];
            break;
        case NodeKind::Const1:
            v = nd.weight;
            break;
        case NodeKind::Log: {
            const double a = st[--top];
            if (!(a > 0.0)) return {0.0, true};
            v = nd.weight * std::log(a);
            break;
        }
        case NodeKind::Exp: {
            const double a = st[--top];
            if (std::abs(a) > kExpGuard) return {0.0, true};
            v = nd.weight * std::exp(a);
            break;
        }
        case NodeKind::Div: {
            const double a = st[--top];
            const double b = st[--top];
            if (std::abs(b) < kDivGuard) return {0.0, true};
            v = nd.weight * (a / b);
            break;
        }
        case NodeKind::Add: {
            const double a = st[--top];
            const double b = st[--top];
            v = nd.weight * (a + b);
            break;
        }
        case NodeKind::Sub: {
            const double a = st[--top];
            const double b = st[--top];
            v = nd.weight * (a - b);
            break;
        }
        case NodeKind::Mul: {
            const double a = st[--top];
            const double b = st[--top];
            v = nd.weight * (a * b);
            break;
        }
        default:
            return {0.0, true};
        }
        if (!std::isfinite(v)) return {0.0, true};
        st[top++] = v;
    }
    return {st[0], false};
}

std::string node_kind_name(NodeKind k, int var_index) {
    switch (k) {
    case NodeKind::Add: return "add";
    case NodeKind::Sub: return "sub";
    case NodeKind::Mul: return "mul";
    case NodeKind::Div: return "div";
    case NodeKind::Log: return "log";
    case NodeKind::Exp: return "exp";
    case NodeKind::Var: return "var" + std::to_string(var_index);
    case NodeKind::Const1: return "const1";
    }
    return "?";
}

std::string ExpressionTree::to_text() const {
    std::string out;
    out.reserve(nodes_.size() * 16);
    std::vector<int> open;
    for (const Node& n : nodes_) {
        if (!out.empty() && out.back() != '(') out.push_back(' ');
        out.push_back('(');
        out += node_kind_name(n.kind, n.var);
        out += " w=";
        out += format_double(n.weight);
        if (const int a = arity(n.kind); a > 0) {
            open.push_back(a);
        } else {
            out.push_back(')');
            while (!open.empty()) {
                if (--open.back() == 0) {
                    open.pop_back();
                    out.push_back(')');
                } else {
                    break;
                }
            }
        }
    }
    return out;
}

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
                                     text[pos] == '\r'))
            ++pos;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("expression parse error at offset " + std::to_string(pos) + ": " + what);
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    std::string_view atom() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != '(' && text[pos] != ')' && text[pos] != ' ' &&
               text[pos] != '\t' && text[pos] != '\n' && text[pos] != '\r')
            ++pos;
        if (pos == start) fail("expected token");
        return text.substr(start, pos - start);
    }

    void parse_node(std::vector<Node>& out) {
        expect('(');
        const std::string_view name = atom();
        Node node;
        if (name == "add") node.kind = NodeKind::Add;
        else if (name == "sub") node.kind = NodeKind::Sub;
        else if (name == "mul") node.kind = NodeKind::Mul;
        else if (name == "div") node.kind = NodeKind::Div;
        else if (name == "log") node.kind = NodeKind::Log;
        else if (name == "exp") node.kind = NodeKind::Exp;
        else if (name == "const1") node.kind = NodeKind::Const1;
        else if (name.substr(0, 3) == "var" && name.size() > 3) {
            node.kind = NodeKind::Var;
            int idx = 0;
            for (char c : name.substr(3)) {
                if (c < '0' || c > '9') fail("bad variable index in '" + std::string(name) + "'");
                idx = idx * 10 + (c - '0');
            }
            if (idx > 255) fail("variable index out of range");
            node.var = static_cast<std::uint8_t>(idx);
        } else {
            fail("unknown node kind '" + std::string(name) + "'");
        }

        const std::string_view w = atom();
        if (w.substr(0, 2) != "w=") fail("expected w=<weight>");
        const std::string weight_text(w.substr(2));
        char* endp = nullptr;
        node.weight = std::strtod(weight_text.c_str(), &endp);
        if (endp == weight_text.c_str() || *endp != '\0') fail("bad weight '" + weight_text + "'");

        out.push_back(node);
        for (int i = 0; i < arity(node.kind); ++i) parse_node(out);
        expect(')');
    }
};

} // namespace

ExpressionTree ExpressionTree::parse(std::string_view text) {
    Parser p{text};
    std::vector<Node> nodes;
    p.parse_node(nodes);
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input after expression");
    return ExpressionTree(std::move(nodes));
}

} // namespace drsr
