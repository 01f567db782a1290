#pragma once
// Minimal arithmetic expression parser for chart-metric coefficients given
// as strings, e.g. "1/(1+(x^2+y^2)/4)^2". Variables x, y; the usual
// operators + - * / ^ with parentheses; functions sin cos tan exp log sqrt
// sinh cosh tanh abs; constants pi, e.

#include <functional>
#include <memory>
#include <string>

namespace mqheat {

class Expr {
public:
    // Throws std::invalid_argument with a position diagnostic on parse errors.
    static Expr parse(const std::string& text);

    double eval(double x, double y) const;

    std::function<double(double, double)> as_function() const {
        auto self = *this;
        return [self](double x, double y) { return self.eval(x, y); };
    }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

}  // namespace mqheat
