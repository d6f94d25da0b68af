#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcomb {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct SubsystemLabel {
    std::string name;
    int dim = 1;
    bool operator==(const SubsystemLabel&) const = default;
};

// Ordered tensor factors; leftmost factor is the most significant index.
class SpaceLayout {
public:
    SpaceLayout() = default;
    SpaceLayout(std::vector<SubsystemLabel> factors);

    const std::vector<SubsystemLabel>& factors() const { return factors_; }
    std::size_t size() const { return factors_.size(); }
    long total_dim() const;
    bool has(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;
    int dim_of(const std::string& name) const;
    long dim_of(const std::vector<std::string>& names) const;
    std::vector<std::string> names() const;
    std::vector<int> dims() const;
    bool operator==(const SpaceLayout&) const = default;

private:
    std::vector<SubsystemLabel> factors_;
};

struct LabeledOperator {
    SpaceLayout layout;
    Mat data;

    LabeledOperator() = default;
    LabeledOperator(SpaceLayout l, Mat d);

    long dim() const { return data.rows(); }
    cplx trace() const { return data.trace(); }
};

struct Tolerances {
    double hermitian = 1e-9;
    double psd = 1e-8;
};

struct PsdCheck {
    bool hermitian = false;
    bool psd = false;
    double min_eigenvalue = 0.0;
    double hermitian_residual = 0.0;
};

LabeledOperator identity(const SpaceLayout& layout);
LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator partial_trace(const LabeledOperator& op, const std::vector<std::string>& over);
LabeledOperator partial_transpose(const LabeledOperator& op, const std::vector<std::string>& over);
LabeledOperator link_product(const LabeledOperator& m, const LabeledOperator& n);
// Reorder factors; order must be a permutation of the layout's names.
LabeledOperator permute(const LabeledOperator& op, const std::vector<std::string>& order);
// Extend op by identities to `target` (whose factors contain op's), in target order.
LabeledOperator embed(const LabeledOperator& op, const SpaceLayout& target);
LabeledOperator relabel(const LabeledOperator& op, const std::vector<std::pair<std::string, std::string>>& renames);

double hermitian_residual(const Mat& m);
bool is_hermitian(const LabeledOperator& op, double tol = 1e-9);
PsdCheck check_psd(const Mat& m, const Tolerances& tol = {});
// Throws InvalidInput when op is not Hermitian within tol.hermitian.
bool is_psd(const LabeledOperator& op, const Tolerances& tol = {});
double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b);
double trace_norm(const Mat& m);

// Index helpers over mixed-radix product spaces.
std::vector<long> strides_of(const std::vector<int>& dims);
// perm[i] = old flat index of the element at new flat index i, for factors reordered by `order`.
std::vector<long> permutation_map(const std::vector<int>& dims, const std::vector<std::size_t>& order);

namespace pauli {
Mat I();
Mat X();
Mat Y();
Mat Z();
}  // namespace pauli

Mat ket_bra(long dim, long i, long j);
Mat projector(const Vec& v);
Mat kron(const Mat& a, const Mat& b);

}  // namespace qcomb
