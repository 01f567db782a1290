#pragma once
// Finite exterior (Grassmann) algebra over several named generator families,
// with Berezin integration. Coefficients are complex so factors of i in
// exp(i<rho,psi>) can be carried exactly; results of full integration are
// checked to be real.
//
// Storage is a dense array of 2^n coefficients indexed by generator-subset
// bitmask; the coefficient stored for a mask is the one of the monomial with
// generators in ascending index order.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqheat/linalg.hpp"

namespace mqheat {

using cplx = std::complex<double>;

struct GeneratorSet {
    // (family name, generator count), in declaration order.
    std::vector<std::pair<std::string, int>> families;

    int total() const {
        int n = 0;
        for (auto& f : families) n += f.second;
        return n;
    }
    // First global index of a family.
    int offset_of(const std::string& name) const {
        int off = 0;
        for (auto& f : families) {
            if (f.first == name) return off;
            off += f.second;
        }
        throw std::invalid_argument("unknown generator family: " + name);
    }
    int count_of(const std::string& name) const {
        for (auto& f : families)
            if (f.first == name) return f.second;
        throw std::invalid_argument("unknown generator family: " + name);
    }
    // Bitmask covering a whole family.
    std::uint32_t mask_of(const std::string& name) const {
        int off = offset_of(name), cnt = count_of(name);
        return ((cnt == 32 ? 0u : (1u << cnt)) - 1u) << off;
    }
    int index_of(const std::string& name, int k) const { return offset_of(name) + k; }

    bool operator==(const GeneratorSet& o) const { return families == o.families; }
    bool operator!=(const GeneratorSet& o) const { return !(*this == o); }

    static GeneratorSet make(std::vector<std::pair<std::string, int>> fams) {
        GeneratorSet g{std::move(fams)};
        if (g.total() > 16)
            throw std::invalid_argument("generator total exceeds 16");
        for (size_t i = 0; i < g.families.size(); ++i)
            for (size_t j = i + 1; j < g.families.size(); ++j)
                if (g.families[i].first == g.families[j].first)
                    throw std::invalid_argument("duplicate family name");
        return g;
    }
};

// Koszul sign of psi^A ^ psi^B for disjoint ascending monomials:
// (-1)^{#(a in A, b in B with a > b)}.
inline int merge_sign(std::uint32_t a, std::uint32_t b) {
    int inv = 0;
    std::uint32_t bb = b;
    while (bb) {
        int j = __builtin_ctz(bb);
        inv += __builtin_popcount(a >> (j + 1));
        bb &= bb - 1;
    }
    return (inv & 1) ? -1 : 1;
}

class GrassmannElement {
public:
    GrassmannElement() = default;
    explicit GrassmannElement(GeneratorSet gens)
        : gens_(std::move(gens)), coeffs_(std::size_t(1) << gens_.total()) {}

    static GrassmannElement scalar(const GeneratorSet& gens, cplx c) {
        GrassmannElement e(gens);
        e.coeffs_[0] = c;
        return e;
    }
    static GrassmannElement monomial(const GeneratorSet& gens, std::uint32_t mask,
                                     cplx c = 1.0) {
        GrassmannElement e(gens);
        e.coeffs_.at(mask) = c;
        return e;
    }

    const GeneratorSet& gens() const { return gens_; }
    std::size_t size() const { return coeffs_.size(); }
    cplx coeff(std::uint32_t mask) const { return coeffs_.at(mask); }
    cplx& coeff(std::uint32_t mask) { return coeffs_.at(mask); }
    const std::vector<cplx>& coeffs() const { return coeffs_; }

    GrassmannElement& operator+=(const GrassmannElement& o) {
        require_same_gens(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    GrassmannElement operator+(const GrassmannElement& o) const {
        GrassmannElement r = *this;
        r += o;
        return r;
    }
    GrassmannElement operator*(cplx c) const {
        GrassmannElement r = *this;
        for (auto& v : r.coeffs_) v *= c;
        return r;
    }
    GrassmannElement operator-(const GrassmannElement& o) const {
        return *this + o * cplx(-1.0);
    }

    bool is_zero(double tol = 0.0) const {
        for (auto& v : coeffs_)
            if (std::abs(v.real()) > tol || std::abs(v.imag()) > tol) return false;
        return true;
    }
    double max_abs() const {
        double m = 0.0;
        for (auto& v : coeffs_) m = std::max(m, std::abs(v));
        return m;
    }
    double max_abs_imag() const {
        double m = 0.0;
        for (auto& v : coeffs_) m = std::max(m, std::abs(v.imag()));
        return m;
    }
    // True if every nonzero monomial has even degree (such elements commute).
    bool is_even(double tol = 0.0) const {
        for (std::size_t m = 0; m < coeffs_.size(); ++m)
            if ((__builtin_popcount(std::uint32_t(m)) & 1) &&
                std::abs(coeffs_[m]) > tol)
                return false;
        return true;
    }

    void require_same_gens(const GrassmannElement& o) const {
        if (gens_ != o.gens_)
            throw std::invalid_argument("generator set mismatch");
    }

private:
    GeneratorSet gens_;
    std::vector<cplx> coeffs_;
};

// Associative graded product with Koszul signs.
GrassmannElement wedge(const GrassmannElement& a, const GrassmannElement& b);

// Left odd derivation d/d(psi^index): removes the generator with sign
// (-1)^{# earlier generators in the monomial}.
GrassmannElement contract(int index, const GrassmannElement& a);

// sum_k a^k / k!; requires an even element (historically a scalar part is
// allowed and handled as an ordinary exponential prefactor).
GrassmannElement grassmann_exp(const GrassmannElement& a);

// Berezin integral over one family: extracts the coefficient of the full
// family monomial (family generators factored to the left in ascending
// order), returning an element supported on the remaining generators.
GrassmannElement berezin(const std::string& family, const GrassmannElement& a);

// Linear map Lambda(T_yM) -> Lambda(T_xM) in fixed orthonormal frames,
// stored dense on the basis of subset monomials ordered by bitmask.
struct FiberOperator {
    int dim = 0;  // 2^{2m}
    std::vector<double> mat;  // row major: mat[row * dim + col]

    FiberOperator() = default;
    explicit FiberOperator(int d) : dim(d), mat(std::size_t(d) * d, 0.0) {}

    static FiberOperator identity(int d) {
        FiberOperator f(d);
        for (int i = 0; i < d; ++i) f.mat[std::size_t(i) * d + i] = 1.0;
        return f;
    }

    double operator()(int r, int c) const { return mat[std::size_t(r) * dim + c]; }
    double& operator()(int r, int c) { return mat[std::size_t(r) * dim + c]; }

    FiberOperator operator*(const FiberOperator& o) const {
        FiberOperator r(dim);
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) {
                double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < dim; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }
    FiberOperator operator*(double c) const {
        FiberOperator r = *this;
        for (auto& v : r.mat) v *= c;
        return r;
    }
    FiberOperator operator-(const FiberOperator& o) const {
        FiberOperator r = *this;
        for (std::size_t i = 0; i < mat.size(); ++i) r.mat[i] -= o.mat[i];
        return r;
    }
    double max_abs_diff(const FiberOperator& o) const {
        double m = 0.0;
        for (std::size_t i = 0; i < mat.size(); ++i)
            m = std::max(m, std::abs(mat[i] - o.mat[i]));
        return m;
    }
    double max_abs() const {
        double m = 0.0;
        for (auto& v : mat) m = std::max(m, std::abs(v));
        return m;
    }
    double sigma_max_bound() const {  // max row sum, an upper bound
        double m = 0.0;
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }
};

// Exterior-power lift of a linear map P on the 2m-dimensional fiber:
// basis monomial psi^S maps to the wedge of P-images of its generators.
FiberOperator lambda_lift(const Mat2& p);

// Alternating-sign trace over form degree.
double supertrace_fiber(const FiberOperator& op);

// Materialize a kernel integrand over {psi_x, psi_y, rho} as a matrix:
// column S is the Berezin integral over rho then psi_y of expr ^ psi_y^S,
// read off on the psi_x monomial basis. Imaginary residue must stay below
// imag_tol.
FiberOperator to_fiber_operator(const GrassmannElement& expr, int m,
                                double imag_tol = 1e-12);

// Generator set used by the kernel construction.
GeneratorSet kernel_generators(int m);

}  // namespace mqheat
