#include "mqheat/grassmann.hpp"

#include <cmath>

namespace mqheat {

GrassmannElement wedge(const GrassmannElement& a, const GrassmannElement& b) {
    a.require_same_gens(b);
    GrassmannElement r(a.gens());
    const std::size_t n = a.size();
    for (std::uint32_t ma = 0; ma < n; ++ma) {
        cplx ca = a.coeff(ma);
        if (ca == cplx(0.0)) continue;
        for (std::uint32_t mb = 0; mb < n; ++mb) {
            if (ma & mb) continue;  // repeated generator
            cplx cb = b.coeff(mb);
            if (cb == cplx(0.0)) continue;
            int sign = merge_sign(ma, mb);
            r.coeff(ma | mb) += double(sign) * ca * cb;
        }
    }
    return r;
}

GrassmannElement contract(int index, const GrassmannElement& a) {
    if (index < 0 || index >= a.gens().total())
        throw std::invalid_argument("contract: unknown generator index");
    GrassmannElement r(a.gens());
    const std::uint32_t bit = 1u << index;
    const std::uint32_t below = bit - 1u;
    for (std::uint32_t m = 0; m < a.size(); ++m) {
        if (!(m & bit)) continue;
        cplx c = a.coeff(m);
        if (c == cplx(0.0)) continue;
        int sign = (__builtin_popcount(m & below) & 1) ? -1 : 1;
        r.coeff(m & ~bit) += double(sign) * c;
    }
    return r;
}

GrassmannElement grassmann_exp(const GrassmannElement& a) {
    if (!a.is_even())
        throw std::invalid_argument("grassmann_exp: element has odd-degree part");
    cplx scalar_part = a.coeff(0);
    GrassmannElement nil = a;
    nil.coeff(0) = 0.0;

    GrassmannElement result = GrassmannElement::scalar(a.gens(), 1.0);
    GrassmannElement term = result;
    // Nilpotent: degrees >= 2, so at most total/2 powers survive.
    int kmax = a.gens().total() / 2 + 1;
    for (int k = 1; k <= kmax; ++k) {
        term = wedge(term, nil) * (1.0 / double(k));
        if (term.is_zero()) break;
        result += term;
    }
    return result * std::exp(scalar_part);
}

GrassmannElement berezin(const std::string& family, const GrassmannElement& a) {
    const std::uint32_t fmask = a.gens().mask_of(family);
    GrassmannElement r(a.gens());
    for (std::uint32_t m = 0; m < a.size(); ++m) {
        if ((m & fmask) != fmask) continue;  // needs the full family monomial
        cplx c = a.coeff(m);
        if (c == cplx(0.0)) continue;
        std::uint32_t rest = m & ~fmask;
        // psi^F ^ psi^rest = merge_sign(F, rest) * psi^m, so the coefficient
        // of the left-factored family top in psi^m carries the same sign.
        r.coeff(rest) += double(merge_sign(fmask, rest)) * c;
    }
    return r;
}

FiberOperator lambda_lift(const Mat2& p) {
    // dim 4 basis {1, e1, e2, e1^e2}
    FiberOperator f(4);
    f(0, 0) = 1.0;
    f(1, 1) = p.a00;
    f(1, 2) = p.a01;
    f(2, 1) = p.a10;
    f(2, 2) = p.a11;
    f(3, 3) = p.det();
    return f;
}

double supertrace_fiber(const FiberOperator& op) {
    double s = 0.0;
    for (int i = 0; i < op.dim; ++i) {
        int deg = __builtin_popcount(std::uint32_t(i));
        s += ((deg & 1) ? -1.0 : 1.0) * op(i, i);
    }
    return s;
}

GeneratorSet kernel_generators(int m) {
    return GeneratorSet::make({{"psi_x", 2 * m}, {"psi_y", 2 * m}, {"rho", 2 * m}});
}

FiberOperator to_fiber_operator(const GrassmannElement& expr, int m,
                                double imag_tol) {
    const GeneratorSet& gens = expr.gens();
    const int two_m = 2 * m;
    const int dim = 1 << two_m;
    const int yoff = gens.offset_of("psi_y");
    const std::uint32_t xmask = gens.mask_of("psi_x");

    FiberOperator out(dim);
    for (int s = 0; s < dim; ++s) {
        // alpha = psi_y^S with ascending generator order
        GrassmannElement alpha = GrassmannElement::monomial(
            gens, std::uint32_t(s) << yoff, 1.0);
        GrassmannElement col = berezin("psi_y", berezin("rho", wedge(expr, alpha)));
        for (std::uint32_t mask = 0; mask < col.size(); ++mask) {
            cplx c = col.coeff(mask);
            if (c == cplx(0.0)) continue;
            if ((mask & ~xmask) != 0)
                throw std::runtime_error(
                    "to_fiber_operator: residue outside psi_x algebra");
            if (std::abs(c.imag()) > imag_tol)
                throw std::runtime_error(
                    "to_fiber_operator: imaginary residue after integration");
            out(int(mask), s) = c.real();
        }
    }
    return out;
}

}  // namespace mqheat
