#include "mqheat/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mqheat {

struct Expr::Node {
    enum class Op { Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Fun };
    Op op = Op::Const;
    double value = 0.0;
    double (*fun)(double) = nullptr;
    std::shared_ptr<const Node> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::Const: return value;
            case Op::VarX: return x;
            case Op::VarY: return y;
            case Op::Add: return a->eval(x, y) + b->eval(x, y);
            case Op::Sub: return a->eval(x, y) - b->eval(x, y);
            case Op::Mul: return a->eval(x, y) * b->eval(x, y);
            case Op::Div: return a->eval(x, y) / b->eval(x, y);
            case Op::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Op::Neg: return -a->eval(x, y);
            case Op::Fun: return fun(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

struct Parser {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("expression error at position " +
                                    std::to_string(pos) + ": " + msg +
                                    " in \"" + s + "\"");
    }
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr n = parse_term();
        for (;;) {
            if (eat('+')) n = make(Op::Add, n, parse_term());
            else if (eat('-')) n = make(Op::Sub, n, parse_term());
            else return n;
        }
    }
    NodePtr parse_term() {
        NodePtr n = parse_unary();
        for (;;) {
            if (eat('*')) n = make(Op::Mul, n, parse_unary());
            else if (eat('/')) n = make(Op::Div, n, parse_unary());
            else return n;
        }
    }
    NodePtr parse_unary() {
        if (eat('-')) return make(Op::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) return make(Op::Pow, base, parse_unary());
        return base;
    }
    NodePtr parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t end = 0;
            double v = std::stod(s.substr(pos), &end);
            pos += end;
            return make_const(v);
        }
        if (c == '(') {
            ++pos;
            NodePtr n = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                    s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "x" || name == "u") return make(Op::VarX);
            if (name == "y" || name == "v") return make(Op::VarY);
            if (name == "pi") return make_const(3.14159265358979323846);
            if (name == "e") return make_const(2.71828182845904523536);
            static const std::vector<std::pair<std::string, double (*)(double)>>
                funs = {{"sin", std::sin},   {"cos", std::cos},
                        {"tan", std::tan},   {"exp", std::exp},
                        {"log", std::log},   {"sqrt", std::sqrt},
                        {"sinh", std::sinh}, {"cosh", std::cosh},
                        {"tanh", std::tanh}, {"abs", std::fabs}};
            for (auto& f : funs) {
                if (name == f.first) {
                    if (!eat('(')) fail("expected '(' after " + name);
                    NodePtr arg = parse_expr();
                    if (!eat(')')) fail("expected ')'");
                    auto n = std::make_shared<Expr::Node>();
                    n->op = Op::Fun;
                    n->fun = f.second;
                    n->a = arg;
                    return n;
                }
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
    Parser p{text};
    NodePtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    Expr e;
    e.root_ = root;
    return e;
}

double Expr::eval(double x, double y) const {
    if (!root_) throw std::logic_error("empty expression");
    return root_->eval(x, y);
}

}  // namespace mqheat
