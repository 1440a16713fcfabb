#pragma once

#include <span>
#include <string>
#include <vector>

#include "equinet/rng.hpp"

namespace equinet {

enum class Activation { Tanh, Sigmoid, Softplus };
double activate(Activation act, double x);

/// Dense row-major real matrix, sized at construction.
struct RealMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    RealMatrix() = default;
    RealMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    static RealMatrix identity(int n);
};

/// Sparse multivariate polynomial over `dim` real variables.
struct SparsePoly {
    struct Term {
        std::vector<int> exps; // length dim
        double coeff = 0.0;
    };
    int dim = 0;
    std::vector<Term> terms;

    double eval(std::span<const double> x) const;
    static SparsePoly monomial(int dim, std::vector<int> exps, double coeff = 1.0);
    static SparsePoly constant(int dim, double c);
};

/// Polynomial map R^dim -> R^out, one SparsePoly per output coordinate.
struct PolyMap {
    int in_dim = 0;
    std::vector<SparsePoly> coords;

    int out_dim() const { return static_cast<int>(coords.size()); }
    std::vector<double> eval(std::span<const double> x) const;
    static PolyMap constant_one(int in_dim);
    static PolyMap identity(int in_dim);
};

/// A finite group given by orthogonal matrices with its composition table.
/// Construction validates orthogonality (1e-10) and the group axioms.
class OrthogonalRep {
public:
    explicit OrthogonalRep(std::vector<RealMatrix> elements);

    static OrthogonalRep trivial(int dim);
    static OrthogonalRep sign_flip(int dim);     // {I, -I}
    static OrthogonalRep cyclic_rotation(int n); // rotations by 2 pi k/n on R^2
    static OrthogonalRep symmetric_group(int n); // permutation matrices, n <= 5

    int dim() const { return dim_; }
    int order() const { return static_cast<int>(elements_.size()); }
    const RealMatrix& matrix(int g) const { return elements_[static_cast<std::size_t>(g)]; }
    int compose(int g, int h) const { return table_[static_cast<std::size_t>(g) * order() + h]; }
    int inverse(int g) const { return inverse_[static_cast<std::size_t>(g)]; }
    std::vector<double> apply(int g, std::span<const double> x) const;
    std::vector<double> apply_inverse(int g, std::span<const double> x) const;

private:
    int dim_;
    std::vector<RealMatrix> elements_;
    std::vector<int> table_;
    std::vector<int> inverse_;
};

/// Generating invariants f_s and equivariants g_m for one representation.
struct PolyFeatureSet {
    std::vector<SparsePoly> invariants;
    std::vector<PolyMap> equivariants;

    /// x1^2, x2^2, ..., and all cross terms xi xj for the sign-flip action.
    static PolyFeatureSet builtin_z2(int dim);
    /// |z|^2, Re z^4, Im z^4 with equivariants z and conj(z)^3 for Z_4 on R^2.
    static PolyFeatureSet builtin_z4_rotation();
    /// Power sums p_1..p_n with equivariants (x_k^{p-1})_k for S_n on R^n.
    static PolyFeatureSet builtin_sn_power_sums(int n);

    /// Checks f_s(R_g x) = f_s(x) and g_m(R_g x) = R_g g_m(x) on random
    /// probes; throws on deviation above tol.
    void validate(const OrthogonalRep& rep, int probes, double tol, Rng& rng) const;
};

/// Shallow net weights shared by the symmetrized ansatzes: unit n has outer
/// coefficient c_n (invariant mode) or outer vector y_n (equivariant mode),
/// linear functional l_n and bias h_n.
struct ShallowNet {
    std::vector<double> c;              // N
    std::vector<std::vector<double>> l; // N x d
    std::vector<double> h;              // N
    std::vector<std::vector<double>> y; // N x d (equivariant mode)
    Activation act = Activation::Tanh;

    static ShallowNet random(int units, int dim, Rng& rng, bool equivariant = false);
};

/// Group-averaged shallow net, invariant mode:
/// (1/|G|) sum_g sum_n c_n sigma(l_n(R_g x) + h_n).
double symmetrize_eval_invariant(const OrthogonalRep& rep, const ShallowNet& net,
                                 std::span<const double> x);
/// Equivariant mode: (1/|G|) sum_g sum_n R_g^{-1} y_n sigma(l_n(R_g x) + h_n).
std::vector<double> symmetrize_eval_equivariant(const OrthogonalRep& rep, const ShallowNet& net,
                                                std::span<const double> x);
/// Per-unit invariant features (1/|G|) sum_g sigma(l_n(R_g x) + h_n), so the
/// outer coefficients can be fit linearly.
std::vector<double> symmetrize_features(const OrthogonalRep& rep, const ShallowNet& net,
                                        std::span<const double> x);

/// Weights of the polynomial-feature ansatz
/// sum_n sum_m c_{mn} g_m(x) sigma(sum_s w_{mns} f_s(x) + h_{mn}).
struct PolyAnsatzWeights {
    std::vector<std::vector<double>> c;              // [m][n]
    std::vector<std::vector<std::vector<double>>> w; // [m][n][s]
    std::vector<std::vector<double>> h;              // [m][n]
    Activation act = Activation::Tanh;

    static PolyAnsatzWeights random(int n_eq, int units, int n_inv, Rng& rng);
};

std::vector<double> poly_ansatz_eval(const PolyFeatureSet& features, const PolyAnsatzWeights& wt,
                                     std::span<const double> x);
/// Features sigma(sum_s w_{ns} f_s(x) + h_n) of the invariant one-equivariant
/// ansatz (g == 1), for linear fitting of the outer layer.
std::vector<double> poly_invariant_features(const PolyFeatureSet& features,
                                            const PolyAnsatzWeights& wt,
                                            std::span<const double> x);

/// One isotypic block V_alpha^{m_alpha} with dim(V_alpha) = dim.
struct IsotypeBlock {
    int multiplicity = 0;
    int dim = 0;
};

/// Polarized invariant ansatz: block maps A_t = (+)_alpha 1 (x) A_alpha send
/// V = (+)_alpha V_alpha^{m_alpha} to the reference module
/// V' = (+)_alpha V_alpha^{dim V_alpha}; shared features live on V'.
struct PolarizedAnsatz {
    std::vector<IsotypeBlock> blocks;
    PolyFeatureSet features; // invariants on V'
    // maps[t][alpha] has shape multiplicity x dim, per the block convention
    // y_{j,k} = sum_i A[i][j] x_{i,k}
    std::vector<std::vector<RealMatrix>> maps;
    std::vector<double> c;              // T
    std::vector<std::vector<double>> w; // T x N_inv
    std::vector<double> h;              // T
    Activation act = Activation::Tanh;

    int v_dim() const;
    int vprime_dim() const;
    std::vector<double> block_apply(int t, std::span<const double> x) const;
};

double polarized_ansatz_eval(const PolarizedAnsatz& ansatz, std::span<const double> x);

/// First-n coordinate power sums: component p is sum_k y_k^p, p = 1..n.
std::vector<double> power_sums(std::span<const double> y);

/// Weights of the S_N-invariant two-hidden-layer ansatz.
struct SymNetWeights {
    int t1 = 0, t2 = 0, m = 0;
    std::vector<double> c, h;    // T1
    std::vector<double> b, e;    // T2
    RealMatrix w;                // T2 x T1
    RealMatrix a;                // T1 x M
    Activation act = Activation::Tanh;

    static SymNetWeights random(int t1, int t2, int m, Rng& rng);
};

/// sum_t c_t sigma( sum_q w_qt sum_n sigma(b_q sum_m a_tm X_nm + e_q) + h_t ).
/// The inner sum over rows n uses a value-sorted canonical order, which makes
/// the output bit-identical under any row permutation of X.
double symmetric_net_eval(const SymNetWeights& w, const RealMatrix& X);
/// The T1 per-unit features sigma(...), for linear fitting of c.
std::vector<double> symmetric_net_features(const SymNetWeights& w, const RealMatrix& X);

/// Ridge regression min ||design w - targets||^2 + reg ||w||^2 through the
/// normal equations with an SPD solve. reg = 0 on a singular system throws,
/// instructing reg > 0.
std::vector<double> fit_ridge(const RealMatrix& design, const std::vector<double>& targets,
                              double reg);

} // namespace equinet
