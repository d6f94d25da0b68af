#include "qcomb/operators.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "qcomb/error.hpp"

namespace qcomb {

SpaceLayout::SpaceLayout(std::vector<SubsystemLabel> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
        if (f.dim < 1) throw InvalidInput("subsystem '" + f.name + "' has dimension < 1");
        if (!seen.insert(f.name).second) throw InvalidInput("duplicate subsystem label '" + f.name + "'");
    }
}

long SpaceLayout::total_dim() const {
    long d = 1;
    for (const auto& f : factors_) d *= f.dim;
    return d;
}

bool SpaceLayout::has(const std::string& name) const {
    return std::any_of(factors_.begin(), factors_.end(), [&](const auto& f) { return f.name == name; });
}

std::size_t SpaceLayout::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].name == name) return i;
    throw InvalidInput("unknown subsystem label '" + name + "'");
}

int SpaceLayout::dim_of(const std::string& name) const { return factors_[index_of(name)].dim; }

long SpaceLayout::dim_of(const std::vector<std::string>& names) const {
    long d = 1;
    for (const auto& n : names) d *= dim_of(n);
    return d;
}

std::vector<std::string> SpaceLayout::names() const {
    std::vector<std::string> out;
    for (const auto& f : factors_) out.push_back(f.name);
    return out;
}

std::vector<int> SpaceLayout::dims() const {
    std::vector<int> out;
    for (const auto& f : factors_) out.push_back(f.dim);
    return out;
}

LabeledOperator::LabeledOperator(SpaceLayout l, Mat d) : layout(std::move(l)), data(std::move(d)) {
    if (data.rows() != data.cols()) throw InvalidInput("operator is not square");
    if (data.rows() != layout.total_dim())
        throw InvalidInput("operator dimension " + std::to_string(data.rows()) + " does not match layout dimension " +
                           std::to_string(layout.total_dim()));
}

std::vector<long> strides_of(const std::vector<int>& dims) {
    std::vector<long> s(dims.size(), 1);
    for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
    return s;
}

namespace {

// Offsets (in the original flat index) of every multi-index over the selected factors,
// enumerated in the order the factors are listed.
std::vector<long> offsets(const std::vector<int>& dims, const std::vector<std::size_t>& sel) {
    const auto strides = strides_of(dims);
    std::vector<long> out{0};
    for (std::size_t f : sel) {
        std::vector<long> next;
        next.reserve(out.size() * dims[f]);
        for (long base : out)
            for (int k = 0; k < dims[f]; ++k) next.push_back(base + k * strides[f]);
        out.swap(next);
    }
    return out;
}

std::vector<std::size_t> indices_of(const SpaceLayout& l, const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) throw InvalidInput("label '" + n + "' listed twice");
        out.push_back(l.index_of(n));
    }
    return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& sel) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(sel.begin(), sel.end(), i) == sel.end()) out.push_back(i);
    return out;
}

SpaceLayout sub_layout(const SpaceLayout& l, const std::vector<std::size_t>& sel) {
    std::vector<SubsystemLabel> f;
    for (auto i : sel) f.push_back(l.factors()[i]);
    return SpaceLayout(f);
}

}  // namespace

std::vector<long> permutation_map(const std::vector<int>& dims, const std::vector<std::size_t>& order) {
    return offsets(dims, order);
}

LabeledOperator identity(const SpaceLayout& layout) {
    return {layout, Mat::Identity(layout.total_dim(), layout.total_dim())};
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
    auto f = a.layout.factors();
    for (const auto& x : b.layout.factors()) f.push_back(x);
    return {SpaceLayout(f), kron(a.data, b.data)};
}

LabeledOperator permute(const LabeledOperator& op, const std::vector<std::string>& order) {
    if (order.size() != op.layout.size()) throw InvalidInput("permutation does not list every factor");
    const auto sel = indices_of(op.layout, order);
    const auto map = offsets(op.layout.dims(), sel);
    const long d = op.dim();
    Mat out(d, d);
    for (long j = 0; j < d; ++j)
        for (long i = 0; i < d; ++i) out(i, j) = op.data(map[i], map[j]);
    return {sub_layout(op.layout, sel), std::move(out)};
}

LabeledOperator partial_trace(const LabeledOperator& op, const std::vector<std::string>& over) {
    const auto tr = indices_of(op.layout, over);
    const auto keep = complement(op.layout.size(), tr);
    const auto dims = op.layout.dims();
    const auto ko = offsets(dims, keep);
    const auto to = offsets(dims, tr);
    const long d = static_cast<long>(ko.size());
    Mat out = Mat::Zero(d, d);
    for (long j = 0; j < d; ++j)
        for (long i = 0; i < d; ++i) {
            cplx s = 0;
            for (long t : to) s += op.data(ko[i] + t, ko[j] + t);
            out(i, j) = s;
        }
    return {sub_layout(op.layout, keep), std::move(out)};
}

LabeledOperator partial_transpose(const LabeledOperator& op, const std::vector<std::string>& over) {
    const auto tr = indices_of(op.layout, over);
    const auto keep = complement(op.layout.size(), tr);
    const auto dims = op.layout.dims();
    const auto ko = offsets(dims, keep);
    const auto to = offsets(dims, tr);
    Mat out(op.dim(), op.dim());
    for (long rk : ko)
        for (long rt : to)
            for (long ck : ko)
                for (long ct : to) out(rk + ct, ck + rt) = op.data(rk + rt, ck + ct);
    return {op.layout, std::move(out)};
}

LabeledOperator link_product(const LabeledOperator& m, const LabeledOperator& n) {
    std::vector<std::string> shared;
    for (const auto& f : m.layout.factors()) {
        if (!n.layout.has(f.name)) continue;
        if (n.layout.dim_of(f.name) != f.dim)
            throw InvalidInput("dimension mismatch on shared label '" + f.name + "'");
        shared.push_back(f.name);
    }
    const auto mb = indices_of(m.layout, shared);
    const auto nb = indices_of(n.layout, shared);
    const auto ma = complement(m.layout.size(), mb);
    const auto nc = complement(n.layout.size(), nb);
    const auto a_off = offsets(m.layout.dims(), ma);
    const auto bm_off = offsets(m.layout.dims(), mb);
    const auto bn_off = offsets(n.layout.dims(), nb);
    const auto c_off = offsets(n.layout.dims(), nc);
    const long A = static_cast<long>(a_off.size()), B = static_cast<long>(bm_off.size()),
               C = static_cast<long>(c_off.size());

    // P[(a,a'),(b'',b)] = M[(a,b''),(a',b)],  Q[(c,c'),(b'',b)] = N[(b'',c),(b,c')]
    Mat P(A * A, B * B), Q(C * C, B * B);
    for (long a = 0; a < A; ++a)
        for (long ap = 0; ap < A; ++ap)
            for (long b2 = 0; b2 < B; ++b2)
                for (long b = 0; b < B; ++b) P(a * A + ap, b2 * B + b) = m.data(a_off[a] + bm_off[b2], a_off[ap] + bm_off[b]);
    for (long c = 0; c < C; ++c)
        for (long cp = 0; cp < C; ++cp)
            for (long b2 = 0; b2 < B; ++b2)
                for (long b = 0; b < B; ++b) Q(c * C + cp, b2 * B + b) = n.data(bn_off[b2] + c_off[c], bn_off[b] + c_off[cp]);
    const Mat R = P * Q.transpose();

    Mat out(A * C, A * C);
    for (long a = 0; a < A; ++a)
        for (long ap = 0; ap < A; ++ap)
            for (long c = 0; c < C; ++c)
                for (long cp = 0; cp < C; ++cp) out(a * C + c, ap * C + cp) = R(a * A + ap, c * C + cp);

    std::vector<SubsystemLabel> f;
    for (auto i : ma) f.push_back(m.layout.factors()[i]);
    for (auto i : nc) f.push_back(n.layout.factors()[i]);
    return {SpaceLayout(f), std::move(out)};
}

LabeledOperator embed(const LabeledOperator& op, const SpaceLayout& target) {
    std::vector<SubsystemLabel> rest;
    for (const auto& f : target.factors()) {
        if (op.layout.has(f.name)) {
            if (op.layout.dim_of(f.name) != f.dim) throw InvalidInput("dimension mismatch on '" + f.name + "'");
        } else {
            rest.push_back(f);
        }
    }
    for (const auto& f : op.layout.factors())
        if (!target.has(f.name)) throw InvalidInput("label '" + f.name + "' missing from target layout");
    return permute(kron(op, identity(SpaceLayout(rest))), target.names());
}

LabeledOperator relabel(const LabeledOperator& op, const std::vector<std::pair<std::string, std::string>>& renames) {
    auto f = op.layout.factors();
    for (const auto& [from, to] : renames) f[op.layout.index_of(from)].name = to;
    return {SpaceLayout(f), op.data};
}

double hermitian_residual(const Mat& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

bool is_hermitian(const LabeledOperator& op, double tol) { return hermitian_residual(op.data) <= tol; }

PsdCheck check_psd(const Mat& m, const Tolerances& tol) {
    PsdCheck r;
    r.hermitian_residual = m.size() ? hermitian_residual(m) : 0.0;
    r.hermitian = r.hermitian_residual <= tol.hermitian;
    if (!r.hermitian) return r;
    const Mat h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
    r.psd = r.min_eigenvalue >= -tol.psd;
    return r;
}

bool is_psd(const LabeledOperator& op, const Tolerances& tol) {
    const auto r = check_psd(op.data, tol);
    if (!r.hermitian) throw InvalidInput("operator is not Hermitian (residual " + std::to_string(r.hermitian_residual) + ")");
    return r.psd;
}

double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b) {
    const auto bb = a.layout == b.layout ? b : permute(b, a.layout.names());
    if (!(bb.layout == a.layout)) throw InvalidInput("layouts differ");
    return (a.data - bb.data).cwiseAbs().maxCoeff();
}

double trace_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    if (hermitian_residual(m) < 1e-12) {
        Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

namespace pauli {
Mat I() { return Mat::Identity(2, 2); }
Mat X() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
Mat Y() {
    Mat m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
Mat Z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
}  // namespace pauli

Mat ket_bra(long dim, long i, long j) {
    Mat m = Mat::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}

Mat projector(const Vec& v) { return v * v.adjoint(); }

}  // namespace qcomb
