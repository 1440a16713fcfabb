#include "equinet/invariant_nets.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace equinet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double mat_product_dist(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c) {
    // || a*b - c ||_inf
    double m = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(k, j);
            m = std::max(m, std::abs(acc - c.at(i, j)));
        }
    return m;
}

} // namespace

double activate(Activation act, double x) {
    switch (act) {
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Softplus: return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    }
    throw std::logic_error("activate: unknown activation");
}

RealMatrix RealMatrix::identity(int n) {
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

double SparsePoly::eval(std::span<const double> x) const {
    double acc = 0.0;
    for (const Term& t : terms) {
        double v = t.coeff;
        for (int i = 0; i < dim; ++i)
            for (int p = 0; p < t.exps[static_cast<std::size_t>(i)]; ++p) v *= x[static_cast<std::size_t>(i)];
        acc += v;
    }
    return acc;
}

SparsePoly SparsePoly::monomial(int dim, std::vector<int> exps, double coeff) {
    if (static_cast<int>(exps.size()) != dim)
        throw std::invalid_argument("SparsePoly::monomial: exponent count mismatch");
    SparsePoly p;
    p.dim = dim;
    p.terms.push_back({std::move(exps), coeff});
    return p;
}

SparsePoly SparsePoly::constant(int dim, double c) {
    SparsePoly p;
    p.dim = dim;
    p.terms.push_back({std::vector<int>(static_cast<std::size_t>(dim), 0), c});
    return p;
}

std::vector<double> PolyMap::eval(std::span<const double> x) const {
    std::vector<double> out(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) out[i] = coords[i].eval(x);
    return out;
}

PolyMap PolyMap::constant_one(int in_dim) {
    PolyMap m;
    m.in_dim = in_dim;
    m.coords.push_back(SparsePoly::constant(in_dim, 1.0));
    return m;
}

PolyMap PolyMap::identity(int in_dim) {
    PolyMap m;
    m.in_dim = in_dim;
    for (int i = 0; i < in_dim; ++i) {
        std::vector<int> e(static_cast<std::size_t>(in_dim), 0);
        e[static_cast<std::size_t>(i)] = 1;
        m.coords.push_back(SparsePoly::monomial(in_dim, std::move(e)));
    }
    return m;
}

OrthogonalRep::OrthogonalRep(std::vector<RealMatrix> elements) : elements_(std::move(elements)) {
    require(!elements_.empty(), "OrthogonalRep: empty element list");
    dim_ = elements_[0].rows;
    const double tol = 1e-10;
    for (const RealMatrix& m : elements_) {
        require(m.rows == dim_ && m.cols == dim_, "OrthogonalRep: inconsistent dimensions");
        // R^T R = I
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                double acc = 0.0;
                for (int k = 0; k < dim_; ++k) acc += m.at(k, i) * m.at(k, j);
                require(std::abs(acc - (i == j ? 1.0 : 0.0)) <= tol,
                        "OrthogonalRep: matrix not orthogonal");
            }
    }
    int n = order();
    table_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h) {
            int found = -1;
            for (int k = 0; k < n; ++k)
                if (mat_product_dist(elements_[static_cast<std::size_t>(g)],
                                     elements_[static_cast<std::size_t>(h)],
                                     elements_[static_cast<std::size_t>(k)]) <= tol) {
                    require(found < 0, "OrthogonalRep: duplicate elements in list");
                    found = k;
                }
            require(found >= 0, "OrthogonalRep: set not closed under composition");
            table_[static_cast<std::size_t>(g) * n + h] = found;
        }
    int identity = -1;
    for (int g = 0; g < n; ++g) {
        bool is_id = true;
        for (int h = 0; h < n; ++h)
            if (compose(g, h) != h || compose(h, g) != h) is_id = false;
        if (is_id) identity = g;
    }
    require(identity >= 0, "OrthogonalRep: no identity element");
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (int g = 0; g < n; ++g) {
        for (int h = 0; h < n; ++h)
            if (compose(g, h) == identity && compose(h, g) == identity) inverse_[static_cast<std::size_t>(g)] = h;
        require(inverse_[static_cast<std::size_t>(g)] >= 0, "OrthogonalRep: missing inverse");
    }
}

OrthogonalRep OrthogonalRep::trivial(int dim) {
    return OrthogonalRep({RealMatrix::identity(dim)});
}

OrthogonalRep OrthogonalRep::sign_flip(int dim) {
    RealMatrix neg = RealMatrix::identity(dim);
    for (int i = 0; i < dim; ++i) neg.at(i, i) = -1.0;
    return OrthogonalRep({RealMatrix::identity(dim), neg});
}

OrthogonalRep OrthogonalRep::cyclic_rotation(int n) {
    require(n >= 1, "cyclic_rotation: order must be positive");
    std::vector<RealMatrix> els;
    for (int k = 0; k < n; ++k) {
        double a = 2.0 * M_PI * k / n;
        RealMatrix m(2, 2);
        m.at(0, 0) = std::cos(a);
        m.at(0, 1) = -std::sin(a);
        m.at(1, 0) = std::sin(a);
        m.at(1, 1) = std::cos(a);
        els.push_back(m);
    }
    return OrthogonalRep(std::move(els));
}

OrthogonalRep OrthogonalRep::symmetric_group(int n) {
    require(n >= 1 && n <= 5, "symmetric_group: n must be in [1, 5]");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<RealMatrix> els;
    do {
        RealMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(perm[static_cast<std::size_t>(i)], i) = 1.0;
        els.push_back(m);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return OrthogonalRep(std::move(els));
}

std::vector<double> OrthogonalRep::apply(int g, std::span<const double> x) const {
    const RealMatrix& m = matrix(g);
    std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dim_; ++j) acc += m.at(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

std::vector<double> OrthogonalRep::apply_inverse(int g, std::span<const double> x) const {
    return apply(inverse(g), x);
}

PolyFeatureSet PolyFeatureSet::builtin_z2(int dim) {
    PolyFeatureSet fs;
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            std::vector<int> e(static_cast<std::size_t>(dim), 0);
            e[static_cast<std::size_t>(i)] += 1;
            e[static_cast<std::size_t>(j)] += 1;
            fs.invariants.push_back(SparsePoly::monomial(dim, std::move(e)));
        }
    fs.equivariants.push_back(PolyMap::identity(dim));
    return fs;
}

PolyFeatureSet PolyFeatureSet::builtin_z4_rotation() {
    PolyFeatureSet fs;
    // |z|^2 = x^2 + y^2
    SparsePoly r2;
    r2.dim = 2;
    r2.terms.push_back({{2, 0}, 1.0});
    r2.terms.push_back({{0, 2}, 1.0});
    fs.invariants.push_back(r2);
    // Re z^4 = x^4 - 6 x^2 y^2 + y^4
    SparsePoly re4;
    re4.dim = 2;
    re4.terms.push_back({{4, 0}, 1.0});
    re4.terms.push_back({{2, 2}, -6.0});
    re4.terms.push_back({{0, 4}, 1.0});
    fs.invariants.push_back(re4);
    // Im z^4 = 4 x^3 y - 4 x y^3
    SparsePoly im4;
    im4.dim = 2;
    im4.terms.push_back({{3, 1}, 4.0});
    im4.terms.push_back({{1, 3}, -4.0});
    fs.invariants.push_back(im4);

    fs.equivariants.push_back(PolyMap::identity(2));
    // conj(z)^3 = (x^3 - 3 x y^2, y^3 - 3 x^2 y)
    PolyMap zbar3;
    zbar3.in_dim = 2;
    SparsePoly gx;
    gx.dim = 2;
    gx.terms.push_back({{3, 0}, 1.0});
    gx.terms.push_back({{1, 2}, -3.0});
    SparsePoly gy;
    gy.dim = 2;
    gy.terms.push_back({{0, 3}, 1.0});
    gy.terms.push_back({{2, 1}, -3.0});
    zbar3.coords = {gx, gy};
    fs.equivariants.push_back(zbar3);
    return fs;
}

PolyFeatureSet PolyFeatureSet::builtin_sn_power_sums(int n) {
    PolyFeatureSet fs;
    for (int p = 1; p <= n; ++p) {
        SparsePoly sum;
        sum.dim = n;
        for (int k = 0; k < n; ++k) {
            std::vector<int> e(static_cast<std::size_t>(n), 0);
            e[static_cast<std::size_t>(k)] = p;
            sum.terms.push_back({std::move(e), 1.0});
        }
        fs.invariants.push_back(sum);
    }
    for (int p = 1; p <= n; ++p) {
        PolyMap g;
        g.in_dim = n;
        for (int k = 0; k < n; ++k) {
            std::vector<int> e(static_cast<std::size_t>(n), 0);
            e[static_cast<std::size_t>(k)] = p - 1;
            g.coords.push_back(SparsePoly::monomial(n, std::move(e)));
        }
        fs.equivariants.push_back(g);
    }
    return fs;
}

void PolyFeatureSet::validate(const OrthogonalRep& rep, int probes, double tol, Rng& rng) const {
    int d = rep.dim();
    for (int p = 0; p < probes; ++p) {
        std::vector<double> x(static_cast<std::size_t>(d));
        for (double& v : x) v = rng.pm1();
        for (int g = 0; g < rep.order(); ++g) {
            std::vector<double> gx = rep.apply(g, x);
            for (const SparsePoly& f : invariants)
                if (std::abs(f.eval(gx) - f.eval(x)) > tol)
                    throw std::invalid_argument("PolyFeatureSet: invariant fails on probe");
            for (const PolyMap& gm : equivariants) {
                std::vector<double> lhs = gm.eval(gx);
                std::vector<double> rhs = gm.eval(x);
                if (static_cast<int>(rhs.size()) == d) rhs = rep.apply(g, rhs);
                // constant maps (out_dim 1 on d > 1 modules) are invariant
                for (std::size_t i = 0; i < lhs.size(); ++i)
                    if (std::abs(lhs[i] - rhs[i]) > tol)
                        throw std::invalid_argument("PolyFeatureSet: equivariant fails on probe");
            }
        }
    }
}

ShallowNet ShallowNet::random(int units, int dim, Rng& rng, bool equivariant) {
    ShallowNet net;
    net.c.resize(static_cast<std::size_t>(units));
    net.h.resize(static_cast<std::size_t>(units));
    net.l.resize(static_cast<std::size_t>(units));
    for (int n = 0; n < units; ++n) {
        net.c[static_cast<std::size_t>(n)] = rng.pm1();
        net.h[static_cast<std::size_t>(n)] = rng.pm1();
        net.l[static_cast<std::size_t>(n)].resize(static_cast<std::size_t>(dim));
        for (double& v : net.l[static_cast<std::size_t>(n)]) v = rng.pm1();
    }
    if (equivariant) {
        net.y.resize(static_cast<std::size_t>(units));
        for (int n = 0; n < units; ++n) {
            net.y[static_cast<std::size_t>(n)].resize(static_cast<std::size_t>(dim));
            for (double& v : net.y[static_cast<std::size_t>(n)]) v = rng.pm1();
        }
    }
    return net;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

std::vector<double> symmetrize_features(const OrthogonalRep& rep, const ShallowNet& net,
                                        std::span<const double> x) {
    require(static_cast<int>(x.size()) == rep.dim(), "symmetrize_features: dimension mismatch");
    std::size_t units = net.c.size();
    std::vector<double> feat(units, 0.0);
    for (int g = 0; g < rep.order(); ++g) {
        std::vector<double> gx = rep.apply(g, x);
        for (std::size_t n = 0; n < units; ++n)
            feat[n] += activate(net.act, dot(net.l[n], gx) + net.h[n]);
    }
    for (double& f : feat) f /= rep.order();
    return feat;
}

double symmetrize_eval_invariant(const OrthogonalRep& rep, const ShallowNet& net,
                                 std::span<const double> x) {
    std::vector<double> feat = symmetrize_features(rep, net, x);
    return dot(net.c, feat);
}

std::vector<double> symmetrize_eval_equivariant(const OrthogonalRep& rep, const ShallowNet& net,
                                                std::span<const double> x) {
    require(static_cast<int>(x.size()) == rep.dim(),
            "symmetrize_eval_equivariant: dimension mismatch");
    require(net.y.size() == net.c.size(), "symmetrize_eval_equivariant: missing outer vectors");
    std::vector<double> out(static_cast<std::size_t>(rep.dim()), 0.0);
    for (int g = 0; g < rep.order(); ++g) {
        std::vector<double> gx = rep.apply(g, x);
        for (std::size_t n = 0; n < net.y.size(); ++n) {
            double s = activate(net.act, dot(net.l[n], gx) + net.h[n]);
            std::vector<double> back = rep.apply_inverse(g, net.y[n]);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += back[i] * s;
        }
    }
    for (double& v : out) v /= rep.order();
    return out;
}

PolyAnsatzWeights PolyAnsatzWeights::random(int n_eq, int units, int n_inv, Rng& rng) {
    PolyAnsatzWeights wt;
    wt.c.resize(static_cast<std::size_t>(n_eq));
    wt.w.resize(static_cast<std::size_t>(n_eq));
    wt.h.resize(static_cast<std::size_t>(n_eq));
    for (int m = 0; m < n_eq; ++m) {
        wt.c[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(units));
        wt.h[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(units));
        wt.w[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(units));
        for (int n = 0; n < units; ++n) {
            wt.c[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = rng.pm1();
            wt.h[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = rng.pm1();
            wt.w[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)].resize(
                static_cast<std::size_t>(n_inv));
            for (double& v : wt.w[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)])
                v = rng.pm1();
        }
    }
    return wt;
}

std::vector<double> poly_ansatz_eval(const PolyFeatureSet& features, const PolyAnsatzWeights& wt,
                                     std::span<const double> x) {
    require(!features.equivariants.empty(), "poly_ansatz_eval: no equivariants (use g == 1)");
    require(wt.c.size() == features.equivariants.size(),
            "poly_ansatz_eval: weight/equivariant count mismatch");
    std::vector<double> fvals(features.invariants.size());
    for (std::size_t s = 0; s < fvals.size(); ++s) fvals[s] = features.invariants[s].eval(x);

    int out_dim = features.equivariants[0].out_dim();
    std::vector<double> out(static_cast<std::size_t>(out_dim), 0.0);
    for (std::size_t m = 0; m < features.equivariants.size(); ++m) {
        require(features.equivariants[m].out_dim() == out_dim,
                "poly_ansatz_eval: equivariant output dims differ");
        std::vector<double> gm = features.equivariants[m].eval(x);
        for (std::size_t n = 0; n < wt.c[m].size(); ++n) {
            require(wt.w[m][n].size() == fvals.size(), "poly_ansatz_eval: w index bounds");
            double arg = dot(wt.w[m][n], fvals) + wt.h[m][n];
            double s = activate(wt.act, arg);
            for (int i = 0; i < out_dim; ++i)
                out[static_cast<std::size_t>(i)] += wt.c[m][n] * gm[static_cast<std::size_t>(i)] * s;
        }
    }
    return out;
}

std::vector<double> poly_invariant_features(const PolyFeatureSet& features,
                                            const PolyAnsatzWeights& wt,
                                            std::span<const double> x) {
    require(wt.c.size() == 1, "poly_invariant_features: expected a single equivariant slot");
    std::vector<double> fvals(features.invariants.size());
    for (std::size_t s = 0; s < fvals.size(); ++s) fvals[s] = features.invariants[s].eval(x);
    std::vector<double> feat(wt.c[0].size());
    for (std::size_t n = 0; n < feat.size(); ++n)
        feat[n] = activate(wt.act, dot(wt.w[0][n], fvals) + wt.h[0][n]);
    return feat;
}

int PolarizedAnsatz::v_dim() const {
    int d = 0;
    for (const IsotypeBlock& b : blocks) d += b.multiplicity * b.dim;
    return d;
}

int PolarizedAnsatz::vprime_dim() const {
    int d = 0;
    for (const IsotypeBlock& b : blocks) d += b.dim * b.dim;
    return d;
}

std::vector<double> PolarizedAnsatz::block_apply(int t, std::span<const double> x) const {
    require(static_cast<int>(x.size()) == v_dim(), "PolarizedAnsatz: input dimension mismatch");
    std::vector<double> y(static_cast<std::size_t>(vprime_dim()), 0.0);
    std::size_t xoff = 0, yoff = 0;
    for (std::size_t alpha = 0; alpha < blocks.size(); ++alpha) {
        const IsotypeBlock& blk = blocks[alpha];
        const RealMatrix& A = maps[static_cast<std::size_t>(t)][alpha];
        require(A.rows == blk.multiplicity && A.cols == blk.dim,
                "PolarizedAnsatz: block map shape mismatch");
        for (int j = 0; j < blk.dim; ++j)
            for (int k = 0; k < blk.dim; ++k) {
                double acc = 0.0;
                for (int i = 0; i < blk.multiplicity; ++i)
                    acc += A.at(i, j) * x[xoff + static_cast<std::size_t>(i) * blk.dim + k];
                y[yoff + static_cast<std::size_t>(j) * blk.dim + k] = acc;
            }
        xoff += static_cast<std::size_t>(blk.multiplicity) * blk.dim;
        yoff += static_cast<std::size_t>(blk.dim) * blk.dim;
    }
    return y;
}

double polarized_ansatz_eval(const PolarizedAnsatz& ansatz, std::span<const double> x) {
    double out = 0.0;
    for (std::size_t t = 0; t < ansatz.c.size(); ++t) {
        std::vector<double> y = ansatz.block_apply(static_cast<int>(t), x);
        double arg = ansatz.h[t];
        for (std::size_t s = 0; s < ansatz.features.invariants.size(); ++s)
            arg += ansatz.w[t][s] * ansatz.features.invariants[s].eval(y);
        out += ansatz.c[t] * activate(ansatz.act, arg);
    }
    return out;
}

std::vector<double> power_sums(std::span<const double> y) {
    std::size_t n = y.size();
    require(n >= 1, "power_sums: empty input");
    std::vector<double> out(n, 0.0);
    std::vector<double> pw(n, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            pw[k] *= y[k];
            acc += pw[k];
        }
        out[p] = acc;
    }
    return out;
}

SymNetWeights SymNetWeights::random(int t1, int t2, int m, Rng& rng) {
    SymNetWeights w;
    w.t1 = t1;
    w.t2 = t2;
    w.m = m;
    w.c.assign(static_cast<std::size_t>(t1), 0.0);
    w.h.resize(static_cast<std::size_t>(t1));
    w.b.resize(static_cast<std::size_t>(t2));
    w.e.resize(static_cast<std::size_t>(t2));
    w.w = RealMatrix(t2, t1);
    w.a = RealMatrix(t1, m);
    for (double& v : w.h) v = rng.pm1();
    for (double& v : w.b) v = rng.pm1();
    for (double& v : w.e) v = rng.pm1();
    // inner weights are uniform draws; w is scaled by 1/T2 to keep the outer
    // activation out of saturation
    for (double& v : w.w.data) v = rng.pm1() / t2;
    for (double& v : w.a.data) v = rng.pm1();
    return w;
}

std::vector<double> symmetric_net_features(const SymNetWeights& wt, const RealMatrix& X) {
    require(X.cols == wt.m, "symmetric_net_eval: column count must equal M");
    require(static_cast<int>(wt.c.size()) == wt.t1 && wt.w.rows == wt.t2 && wt.w.cols == wt.t1 &&
                wt.a.rows == wt.t1 && wt.a.cols == wt.m,
            "symmetric_net_eval: weight shapes do not match T1/T2/M");
    int n_rows = X.rows;
    std::vector<double> feat(static_cast<std::size_t>(wt.t1));
    std::vector<double> proj(static_cast<std::size_t>(n_rows));
    std::vector<double> vals(static_cast<std::size_t>(n_rows));
    for (int t = 0; t < wt.t1; ++t) {
        for (int n = 0; n < n_rows; ++n) {
            double acc = 0.0;
            for (int mm = 0; mm < wt.m; ++mm) acc += wt.a.at(t, mm) * X.at(n, mm);
            proj[static_cast<std::size_t>(n)] = acc;
        }
        double outer = wt.h[static_cast<std::size_t>(t)];
        for (int q = 0; q < wt.t2; ++q) {
            for (int n = 0; n < n_rows; ++n)
                vals[static_cast<std::size_t>(n)] = activate(
                    wt.act, wt.b[static_cast<std::size_t>(q)] * proj[static_cast<std::size_t>(n)] +
                                wt.e[static_cast<std::size_t>(q)]);
            // canonical value-sorted order: the inner sum is bit-identical
            // under any row permutation of X
            std::sort(vals.begin(), vals.end());
            double inner = 0.0;
            for (double v : vals) inner += v;
            outer += wt.w.at(q, t) * inner;
        }
        feat[static_cast<std::size_t>(t)] = activate(wt.act, outer);
    }
    return feat;
}

double symmetric_net_eval(const SymNetWeights& wt, const RealMatrix& X) {
    std::vector<double> feat = symmetric_net_features(wt, X);
    double out = 0.0;
    for (std::size_t t = 0; t < feat.size(); ++t) out += wt.c[t] * feat[t];
    return out;
}

std::vector<double> fit_ridge(const RealMatrix& design, const std::vector<double>& targets,
                              double reg) {
    require(reg >= 0.0, "fit_ridge: reg must be nonnegative");
    require(design.rows == static_cast<int>(targets.size()),
            "fit_ridge: row count must match targets");
    int n = design.cols;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        design.data.data(), design.rows, design.cols);
    Eigen::Map<const Eigen::VectorXd> y(targets.data(), targets.size());
    Eigen::MatrixXd gram = A.transpose() * A;
    gram.diagonal().array() += reg;
    Eigen::VectorXd rhs = A.transpose() * y;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        if (reg == 0.0)
            throw std::invalid_argument(
                "fit_ridge: normal equations are singular; pass reg > 0");
        throw std::runtime_error("fit_ridge: SPD factorization failed");
    }
    Eigen::VectorXd w = llt.solve(rhs);
    return std::vector<double>(w.data(), w.data() + n);
}

} // namespace equinet
