#include "qcomb/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "qcomb/error.hpp"

namespace qcomb {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Term {
    int p, q;
    cplx beta;
};

// Orthonormal Hermitian basis: diagonal units, then (re, im) pairs for p < q.
const std::vector<std::vector<Term>>& basis_terms(long d) {
    static thread_local std::vector<std::vector<std::vector<Term>>> cache;
    if (static_cast<long>(cache.size()) <= d) cache.resize(d + 1);
    auto& b = cache[d];
    if (b.empty()) {
        for (int p = 0; p < d; ++p) b.push_back({{p, p, 1.0}});
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                b.push_back({{p, q, kInvSqrt2}, {q, p, kInvSqrt2}});
                b.push_back({{p, q, cplx(0, -kInvSqrt2)}, {q, p, cplx(0, kInvSqrt2)}});
            }
    }
    return b;
}

// T_ab = Re Tr[P B_a Q B_b].
Eigen::MatrixXd bilinear(const Mat& p, const Mat& q) {
    const long d = p.rows();
    const auto& b = basis_terms(d);
    const long n = static_cast<long>(b.size());
    Eigen::MatrixXd t(n, n);
    for (long a = 0; a < n; ++a)
        for (long c = 0; c < n; ++c) {
            cplx s = 0;
            for (const auto& ta : b[a])
                for (const auto& tc : b[c]) s += ta.beta * tc.beta * p(tc.q, ta.p) * q(ta.q, tc.p);
            t(a, c) = s.real();
        }
    return t;
}

// Tr[W B_a W B_b], symmetric.
Eigen::MatrixXd barrier_hessian(const Mat& w) {
    const long d = w.rows();
    const auto& b = basis_terms(d);
    const long n = static_cast<long>(b.size());
    Eigen::MatrixXd h(n, n);
    for (long a = 0; a < n; ++a)
        for (long c = a; c < n; ++c) {
            cplx s = 0;
            for (const auto& ta : b[a])
                for (const auto& tc : b[c]) s += ta.beta * tc.beta * w(tc.q, ta.p) * w(ta.q, tc.p);
            h(a, c) = h(c, a) = s.real();
        }
    return h;
}

bool chol_logdet(const Mat& s, double& logdet, Mat* inverse) {
    Eigen::LLT<Mat> llt(s);
    if (llt.info() != Eigen::Success) return false;
    const auto& l = llt.matrixLLT();
    logdet = 0.0;
    for (long i = 0; i < s.rows(); ++i) {
        const double di = l(i, i).real();
        if (!(di > 0.0) || !std::isfinite(di)) return false;
        logdet += 2.0 * std::log(di);
    }
    if (inverse) *inverse = llt.solve(Mat::Identity(s.rows(), s.cols()));
    return true;
}

std::vector<std::string> subtract(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    for (const auto& x : a)
        if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
    return out;
}

// Hermitian residual coordinates of the unnormalised comb chain.
Eigen::VectorXd chain_residual(const LabeledOperator& g, const TimeStepStructure& s) {
    std::vector<Eigen::VectorXd> parts;
    std::vector<std::string> later;
    for (long k = static_cast<long>(s.steps.size()) - 1; k >= 0; --k) {
        const auto& step = s.steps[k];
        const auto gs = later.empty() ? g : partial_trace(g, later);
        const auto a = step.out.empty() ? gs : partial_trace(gs, step.out);
        std::vector<std::string> both = step.in;
        both.insert(both.end(), step.out.begin(), step.out.end());
        if (!step.in.empty()) {
            auto prev = partial_trace(gs, both);
            std::vector<SubsystemLabel> inl;
            for (const auto& n : step.in) inl.push_back({n, g.layout.dim_of(n)});
            const double din = static_cast<double>(SpaceLayout(inl).total_dim());
            prev.data /= din;
            const auto rhs = permute(kron(identity(SpaceLayout(inl)), prev), a.layout.names());
            parts.push_back(herm_coords(a.data - rhs.data));
        }
        later.insert(later.end(), both.begin(), both.end());
    }
    long n = 0;
    for (const auto& p : parts) n += p.size();
    Eigen::VectorXd out(n);
    long o = 0;
    for (const auto& p : parts) {
        out.segment(o, p.size()) = p;
        o += p.size();
    }
    return out;
}

struct Lmi {
    int block;
    int x;
    Mat c;
};

}  // namespace

Eigen::VectorXd herm_coords(const Mat& x) {
    const long d = x.rows();
    Eigen::VectorXd c(d * d);
    long a = 0;
    for (long p = 0; p < d; ++p) c[a++] = x(p, p).real();
    for (long p = 0; p < d; ++p)
        for (long q = p + 1; q < d; ++q) {
            c[a++] = std::sqrt(2.0) * x(p, q).real();
            c[a++] = -std::sqrt(2.0) * x(p, q).imag();
        }
    return c;
}

Mat herm_from_coords(const Eigen::VectorXd& c, long d) {
    Mat x(d, d);
    long a = 0;
    for (long p = 0; p < d; ++p) x(p, p) = c[a++];
    for (long p = 0; p < d; ++p)
        for (long q = p + 1; q < d; ++q) {
            const cplx v = cplx(c[a], -c[a + 1]) * kInvSqrt2;
            x(p, q) = v;
            x(q, p) = std::conj(v);
            a += 2;
        }
    return x;
}

std::vector<std::string> classical_labels(const std::vector<LabeledOperator>& blocks, double tol) {
    std::vector<std::string> out;
    if (blocks.empty()) return out;
    const auto& layout = blocks.front().layout;
    for (const auto& f : layout.factors()) {
        if (f.dim == 1) continue;
        bool diag = true;
        for (const auto& b : blocks) {
            std::vector<std::string> order{f.name};
            for (const auto& n : b.layout.names())
                if (n != f.name) order.push_back(n);
            const auto p = permute(b, order);
            const long r = p.dim() / f.dim;
            const double scale = std::max(1.0, p.data.cwiseAbs().maxCoeff());
            for (long i = 0; i < f.dim && diag; ++i)
                for (long j = 0; j < f.dim && diag; ++j)
                    if (i != j && p.data.block(i * r, j * r, r, r).cwiseAbs().maxCoeff() > tol * scale) diag = false;
            if (!diag) break;
        }
        if (diag) out.push_back(f.name);
    }
    return out;
}

CombSdpResult solve_guessing_sdp(const std::vector<double>& prior, const std::vector<LabeledOperator>& blocks,
                                 const TimeStepStructure& structure, const SdpOptions& opt) {
    if (blocks.empty() || prior.size() != blocks.size()) throw InvalidInput("prior and blocks must be nonempty and equal in length");
    const SpaceLayout layout = blocks.front().layout;
    check_structure(structure, layout);

    CombSdpResult res;
    if (opt.dephase_classical) res.classical_labels = classical_labels(blocks);
    std::vector<std::string> qlabels = subtract(layout.names(), res.classical_labels);
    std::vector<std::string> order = res.classical_labels;
    order.insert(order.end(), qlabels.begin(), qlabels.end());

    long nk = 1, dq = 1;
    std::vector<SubsystemLabel> rf;
    for (const auto& n : order) rf.push_back({n, layout.dim_of(n)});
    for (const auto& n : res.classical_labels) nk *= layout.dim_of(n);
    for (const auto& n : qlabels) dq *= layout.dim_of(n);
    const SpaceLayout rlayout(rf);
    const long nb = dq * dq, ny = nk * nb;
    if (ny > opt.var_cap) throw CapExceeded("SDP has " + std::to_string(ny) + " real variables, above the cap");

    double din = 1.0;
    for (const auto& n : structure.inputs()) din *= layout.dim_of(n);

    // Comb subspace as the null space of the chain residual map.
    auto embed_y = [&](const Eigen::VectorXd& y) {
        Mat g = Mat::Zero(nk * dq, nk * dq);
        for (long k = 0; k < nk; ++k) g.block(k * dq, k * dq, dq, dq) = herm_from_coords(y.segment(k * nb, nb), dq);
        return LabeledOperator(rlayout, g);
    };
    Eigen::MatrixXd m;
    for (long a = 0; a < ny; ++a) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(ny);
        e[a] = 1.0;
        const auto r = chain_residual(embed_y(e), structure);
        if (a == 0) m.resize(r.size(), ny);
        if (r.size()) m.col(a) = r;
    }
    // Orthonormal basis of the constraint row space; the comb subspace is its complement.
    Eigen::MatrixXd rmat(ny, 0), nmat = Eigen::MatrixXd::Identity(ny, ny);
    if (m.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
        const double top = std::max(1.0, es.eigenvalues().maxCoeff());
        long r = 0;
        while (r < ny && es.eigenvalues()[r] <= 1e-10 * top) ++r;
        rmat = es.eigenvectors().rightCols(ny - r);
        nmat = es.eigenvectors().leftCols(r);
    }
    const long nz = ny - rmat.cols();
    res.variables = nz;
    if (nz == 0) throw SolverFailure("comb space is trivial");

    Eigen::VectorXd by = Eigen::VectorXd::Zero(ny);
    for (long k = 0; k < nk; ++k)
        for (long p = 0; p < dq; ++p) by[k * nb + p] = 1.0 / din;

    // LMIs G_k - P(x) sigma_{x,k} >= 0.
    std::vector<Lmi> lmis;
    double cmax = 0.0;
    std::vector<bool> covered(nk, false);
    for (std::size_t x = 0; x < blocks.size(); ++x) {
        if (prior[x] <= 0.0) continue;
        const auto p = permute(blocks[x], order);
        for (long k = 0; k < nk; ++k) {
            Mat c = prior[x] * p.data.block(k * dq, k * dq, dq, dq);
            c = 0.5 * (c + c.adjoint());
            if (c.cwiseAbs().maxCoeff() == 0.0) continue;
            Eigen::SelfAdjointEigenSolver<Mat> es(c, Eigen::EigenvaluesOnly);
            cmax = std::max(cmax, es.eigenvalues().maxCoeff());
            lmis.push_back({static_cast<int>(k), static_cast<int>(x), c});
            covered[k] = true;
        }
    }
    for (long k = 0; k < nk; ++k)
        if (!covered[k]) lmis.push_back({static_cast<int>(k), -1, Mat::Zero(dq, dq)});
    const double mtot = static_cast<double>(lmis.size() * dq);

    // Strictly feasible start: a multiple of the identity.
    const double lam = std::max(1e-6, 2.0 * cmax);
    Eigen::VectorXd yi = Eigen::VectorXd::Zero(ny);
    for (long k = 0; k < nk; ++k)
        for (long p = 0; p < dq; ++p) yi[k * nb + p] = lam;
    if (rmat.cols() > 0 && (rmat.transpose() * yi).cwiseAbs().maxCoeff() > 1e-8 * lam)
        throw SolverFailure("identity is not an unnormalised comb");
    Eigen::VectorXd z = yi;

    auto evaluate = [&](const Eigen::VectorXd& y, double t, double& f, std::vector<Mat>* winv) {
        std::vector<Mat> g(nk);
        for (long k = 0; k < nk; ++k) g[k] = herm_from_coords(y.segment(k * nb, nb), dq);
        f = t * by.dot(y);
        if (winv) winv->resize(lmis.size());
        for (std::size_t j = 0; j < lmis.size(); ++j) {
            double ld = 0.0;
            if (!chol_logdet(g[lmis[j].block] - lmis[j].c, ld, winv ? &(*winv)[j] : nullptr)) return false;
            f -= ld;
        }
        return true;
    };

    auto dual_value = [&](const std::vector<Mat>& ww, double tt) {
        double d = 0.0;
        for (std::size_t j = 0; j < lmis.size(); ++j) d += (lmis[j].c * ww[j]).trace().real() / tt;
        return d;
    };

    // Newton direction restricted to the comb subspace. The fast path eliminates the chain rows through a
    // Schur complement; the null-space path is slower but survives the ill-conditioning near the optimum.
    const long nr = rmat.cols();
    auto direction = [&](const Eigen::VectorXd& gz, const std::vector<Eigen::MatrixXd>& hk, bool null_space,
                         Eigen::VectorXd& dz) {
        if (null_space) {
            Eigen::MatrixXd hn(ny, nmat.cols());
            for (long k = 0; k < nk; ++k) hn.middleRows(k * nb, nb) = hk[k] * nmat.middleRows(k * nb, nb);
            const Eigen::MatrixXd hz = nmat.transpose() * hn;
            dz = nmat * Eigen::VectorXd(-hz.ldlt().solve(nmat.transpose() * gz));
            return dz.allFinite();
        }
        std::vector<Eigen::LLT<Eigen::MatrixXd>> llts;
        llts.reserve(nk);
        for (long k = 0; k < nk; ++k) {
            llts.emplace_back(hk[k]);
            if (llts.back().info() != Eigen::Success) return false;
        }
        auto hsolve = [&](const Eigen::MatrixXd& v) {
            Eigen::MatrixXd out(v.rows(), v.cols());
            for (long k = 0; k < nk; ++k) out.middleRows(k * nb, nb) = llts[k].solve(v.middleRows(k * nb, nb));
            return out;
        };
        const Eigen::MatrixXd hr = nr > 0 ? hsolve(rmat) : Eigen::MatrixXd(ny, 0);
        const Eigen::VectorXd hg = hsolve(gz);
        dz = -hg;
        if (nr > 0) {
            const Eigen::MatrixXd schur = rmat.transpose() * hr;
            dz += hr * schur.ldlt().solve(rmat.transpose() * hg);
            dz -= rmat * (rmat.transpose() * dz);
        }
        return dz.allFinite();
    };

    double t = mtot / std::max(by.dot(z), 1e-12);
    std::vector<Mat> w;
    Eigen::VectorXd z_good;
    double t_good = 0.0;
    bool null_space = false;
    while (true) {
        bool centred = false;
        for (int it = 0; it < 200; ++it) {
            double f = 0.0;
            if (!evaluate(z, t, f, &w)) throw SolverFailure("lost strict feasibility");
            Eigen::VectorXd gy = Eigen::VectorXd::Zero(ny);
            std::vector<Eigen::MatrixXd> hk(nk, Eigen::MatrixXd::Zero(nb, nb));
            for (std::size_t j = 0; j < lmis.size(); ++j) {
                gy.segment(lmis[j].block * nb, nb) -= herm_coords(w[j]);
                hk[lmis[j].block] += barrier_hessian(w[j]);
            }
            const Eigen::VectorXd gz = t * by + gy;
            Eigen::VectorXd dz;
            if (!direction(gz, hk, null_space, dz)) break;
            double dec = 0.0;
            for (long k = 0; k < nk; ++k) dec += dz.segment(k * nb, nb).dot(hk[k] * dz.segment(k * nb, nb));
            ++res.newton_steps;
            if (res.newton_steps > opt.max_newton) throw SolverFailure("Newton iteration limit reached");
            if (!(dec >= 0.0)) break;
            if (dec / 2.0 < 1e-9) {
                centred = true;
                break;
            }
            // Damped Newton step for a self-concordant barrier; backtrack only to keep strict feasibility.
            const double lam_n = std::sqrt(dec);
            double s = lam_n > 0.25 ? 1.0 / (1.0 + lam_n) : 1.0, fn = 0.0;
            while (s > 1e-14 && !evaluate(z + s * dz, t, fn, nullptr)) s *= 0.5;
            if (s <= 1e-14) break;
            z += s * dz;
        }
        if (!centred) {
            if (t_good == 0.0) throw SolverFailure("barrier centring failed");
            z = z_good;
            if (!null_space) {
                null_space = true;  // retry this t on the robust path
                continue;
            }
            t = t_good;  // precision limit: keep the last centred iterate
            break;
        }
        double f = 0.0;
        evaluate(z, t, f, &w);
        z_good = z;
        t_good = t;
        const double obj = by.dot(z);
        // Off-centre multipliers are only nearly dual feasible, so the central-path bound m/t must hold too.
        const double tol = opt.gap_tol * std::max(1.0, std::fabs(obj));
        if (mtot / t <= tol && obj - dual_value(w, t) <= tol) break;
        t *= opt.mu;
    }
    double f = 0.0;
    if (!evaluate(z, t, f, &w)) throw SolverFailure("lost strict feasibility");

    res.primal = by.dot(z);
    const Eigen::VectorXd& y = z;
    Mat g = Mat::Zero(nk * dq, nk * dq);
    for (long k = 0; k < nk; ++k) g.block(k * dq, k * dq, dq, dq) = herm_from_coords(y.segment(k * nb, nb), dq);
    res.gamma = permute(LabeledOperator(rlayout, g), layout.names());

    // Off the exact central path the multipliers miss dual feasibility by a residual proportional to the
    // Newton decrement. The smallest correction in the local metric Tr[S^-1 D S^-1 D] moves each block sum
    // S_k onto the dual-comb space; the congruence T = S'^{1/2} S^{-1/2} then keeps every W_j positive.
    std::vector<Mat> wj(lmis.size());
    Eigen::VectorXd wy = Eigen::VectorXd::Zero(ny);
    for (std::size_t j = 0; j < lmis.size(); ++j) {
        wj[j] = w[j] / t;
        wy.segment(lmis[j].block * nb, nb) += herm_coords(wj[j]);
    }
    std::vector<Mat> sk(nk);
    Eigen::MatrixXd mn(ny, nmat.cols());
    for (long k = 0; k < nk; ++k) {
        sk[k] = herm_from_coords(wy.segment(k * nb, nb), dq);
        mn.middleRows(k * nb, nb) = barrier_hessian(sk[k]) * nmat.middleRows(k * nb, nb);
    }
    const Eigen::VectorXd rho = nmat.transpose() * (by - wy);
    const Eigen::VectorXd target = wy + mn * Eigen::VectorXd((nmat.transpose() * mn).ldlt().solve(rho));
    for (long k = 0; k < nk; ++k) {
        const Mat tk = herm_from_coords(target.segment(k * nb, nb), dq);
        Eigen::SelfAdjointEigenSolver<Mat> es(sk[k]), et(tk);
        if (es.eigenvalues().minCoeff() <= 0.0 || et.eigenvalues().minCoeff() < 0.0) continue;
        const Mat map = et.operatorSqrt() * es.operatorInverseSqrt();
        for (std::size_t j = 0; j < lmis.size(); ++j)
            if (lmis[j].block == k) wj[j] = map * wj[j] * map.adjoint();
    }

    std::vector<Mat> wx(blocks.size(), Mat::Zero(nk * dq, nk * dq));
    res.dual = 0.0;
    wy.setZero();
    for (std::size_t j = 0; j < lmis.size(); ++j) {
        res.dual += (lmis[j].c * wj[j]).trace().real();
        wy.segment(lmis[j].block * nb, nb) += herm_coords(wj[j]);
        if (lmis[j].x >= 0) wx[lmis[j].x].block(lmis[j].block * dq, lmis[j].block * dq, dq, dq) += wj[j];
    }
    Eigen::VectorXd dres = by - wy;
    if (rmat.cols() > 0) dres -= rmat * (rmat.transpose() * dres);
    res.dual_residual = dres.cwiseAbs().maxCoeff();
    res.gap = res.primal - res.dual;
    for (auto& m2 : wx) res.w.push_back(permute(LabeledOperator(rlayout, m2), layout.names()));
    return res;
}

double pure_state_guessing(const std::vector<Vec>& weighted, double gap_tol) {
    std::vector<Vec> v;
    double nmax = 0.0;
    for (const auto& x : weighted) nmax = std::max(nmax, x.squaredNorm());
    if (nmax == 0.0) return 0.0;
    for (const auto& x : weighted) {
        const double n2 = x.squaredNorm();
        if (n2 <= 1e-15 * nmax) continue;
        bool merged = false;
        for (auto& u : v) {
            const double ov = std::norm(u.dot(x));
            if (ov >= (1.0 - 1e-12) * u.squaredNorm() * n2) {
                if (n2 > u.squaredNorm()) u = x;
                merged = true;
                break;
            }
        }
        if (!merged) v.push_back(x);
    }
    if (v.size() == 1) return v[0].squaredNorm();
    if (v.size() == 2) {
        const double a = v[0].squaredNorm(), b = v[1].squaredNorm(), o = std::norm(v[0].dot(v[1]));
        return 0.5 * (a + b + std::sqrt(std::max(0.0, (a + b) * (a + b) - 4.0 * o)));
    }
    const long d = v[0].size(), k = static_cast<long>(v.size());
    Mat vm(d, k);
    for (long i = 0; i < k; ++i) vm.col(i) = v[i];
    Eigen::ColPivHouseholderQR<Mat> qr(vm);
    qr.setThreshold(1e-12);
    const long r = qr.rank();
    const Mat q = Mat(qr.householderQ()).leftCols(r);
    std::vector<Vec> a(k);
    std::vector<Eigen::VectorXd> ac(k);
    double amax = 0.0;
    for (long i = 0; i < k; ++i) {
        a[i] = q.adjoint() * v[i];
        ac[i] = herm_coords(a[i] * a[i].adjoint());
        amax = std::max(amax, a[i].squaredNorm());
    }
    // min Tr Z^{-1} s.t. a^dag Z a <= 1, with Y = Z^{-1}.
    Eigen::VectorXd z = herm_coords(Mat::Identity(r, r) * (0.5 / amax));
    auto eval = [&](const Eigen::VectorXd& zz, double t, double& f, Mat* rinv, std::vector<double>* slack) {
        const Mat zm = herm_from_coords(zz, r);
        Eigen::LLT<Mat> llt(zm);
        if (llt.info() != Eigen::Success) return false;
        for (long i = 0; i < r; ++i)
            if (!(llt.matrixLLT()(i, i).real() > 0.0)) return false;
        const Mat ri = llt.solve(Mat::Identity(r, r));
        f = t * ri.trace().real();
        if (slack) slack->resize(k);
        for (long i = 0; i < k; ++i) {
            const double s = 1.0 - (a[i].adjoint() * zm * a[i])(0, 0).real();
            if (!(s > 0.0)) return false;
            f -= std::log(s);
            if (slack) (*slack)[i] = s;
        }
        if (rinv) *rinv = ri;
        return std::isfinite(f);
    };
    const double m = static_cast<double>(k);
    double t = 1.0 / amax;
    Mat ri;
    std::vector<double> sl;
    while (true) {
        for (int it = 0; it < 100; ++it) {
            double f = 0.0;
            if (!eval(z, t, f, &ri, &sl)) throw SolverFailure("discrimination barrier lost feasibility");
            const Mat r2 = ri * ri;
            Eigen::VectorXd g = -t * herm_coords(r2);
            const Eigen::MatrixXd tb = bilinear(r2, ri);
            Eigen::MatrixXd h = t * (tb + tb.transpose());
            for (long i = 0; i < k; ++i) {
                g += ac[i] / sl[i];
                h += ac[i] * ac[i].transpose() / (sl[i] * sl[i]);
            }
            const Eigen::VectorXd dz = -h.ldlt().solve(g);
            const double dec = -g.dot(dz);
            if (!(dec >= 0.0) || dec / 2.0 < 1e-12) break;
            double s = 1.0, fn = 0.0;
            while (s > 1e-14) {
                if (eval(z + s * dz, t, fn, nullptr, nullptr) && fn <= f - 0.25 * s * dec) break;
                s *= 0.5;
            }
            if (s <= 1e-14) break;
            z += s * dz;
        }
        if (m / t <= gap_tol * std::max(1e-12, nmax)) break;
        t *= 20.0;
    }
    double f = 0.0;
    eval(z, t, f, &ri, nullptr);
    return ri.trace().real();
}

double state_guessing(const std::vector<Mat>& weighted, const SdpOptions& opt) {
    if (weighted.empty()) return 0.0;
    const SpaceLayout l({{"S", static_cast<int>(weighted.front().rows())}});
    std::vector<LabeledOperator> blocks;
    for (const auto& w : weighted) blocks.emplace_back(l, w);
    TimeStepStructure s;
    s.steps.push_back({{}, {"S"}});
    return solve_guessing_sdp(std::vector<double>(weighted.size(), 1.0), blocks, s, opt).primal;
}

}  // namespace qcomb
