// Copyright 2026 The qcoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra for small registers (dimension up to a few
// dozen): Kronecker products, partial traces, Hermitian eigendecomposition,
// fidelity and trace norm.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcoin {

using cplx = std::complex<double>;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kNorm = 1e-10;
inline constexpr double kIsometry = 1e-10;
inline constexpr double kProjector = 1e-10;
inline constexpr double kNullProbability = 1e-12;
inline constexpr double kJacobiOffDiagonal = 1e-14;
inline constexpr int kJacobiMaxSweeps = 100;
}  // namespace tol

class ComplexMatrix {
   public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix dimensions must be positive");
        }
    }
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw std::invalid_argument("ComplexMatrix entry count does not match dimensions");
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        ComplexMatrix m(values.size(), values.size());
        std::size_t i = 0;
        for (double v : values) {
            m(i, i) = v;
            ++i;
        }
        return m;
    }

    /// |v><w|
    static ComplexMatrix outer(std::span<const cplx> v, std::span<const cplx> w) {
        ComplexMatrix m(v.size(), w.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = 0; j < w.size(); ++j) {
                m(i, j) = v[i] * std::conj(w[j]);
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    std::span<const cplx> entries() const { return data_; }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    cplx trace() const {
        require_square("trace");
        cplx t = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    std::vector<cplx> apply(std::span<const cplx> v) const {
        if (v.size() != cols_) {
            throw std::invalid_argument("matrix-vector dimension mismatch");
        }
        std::vector<cplx> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            cplx acc = 0;
            for (std::size_t c = 0; c < cols_; ++c) {
                acc += (*this)(r, c) * v[c];
            }
            out[r] = acc;
        }
        return out;
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator*=(cplx s) {
        for (auto &x : data_) {
            x *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("matrix product dimension mismatch");
        }
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                cplx aik = a(i, k);
                if (aik == cplx{}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    /// Largest entrywise modulus of (this - other).
    double max_abs_diff(const ComplexMatrix &o) const {
        require_same_shape(o);
        double m = 0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            m = std::max(m, std::abs(data_[i] - o.data_[i]));
        }
        return m;
    }

    double hermitian_defect() const {
        require_square("hermitian_defect");
        double m = 0;
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = r; c < cols_; ++c) {
                m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
            }
        }
        return m;
    }

    bool is_hermitian(double tolerance = tol::kHermitian) const {
        return is_square() && hermitian_defect() <= tolerance;
    }

   private:
    void require_square(const char *op) const {
        if (!is_square()) {
            throw std::invalid_argument(std::string(op) + " requires a square matrix");
        }
    }
    void require_same_shape(const ComplexMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw std::invalid_argument("matrix shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline double norm_squared(std::span<const cplx> v) {
    double s = 0;
    for (const auto &x : v) {
        s += std::norm(x);
    }
    return s;
}

/// <v|w>
inline cplx inner(std::span<const cplx> v, std::span<const cplx> w) {
    if (v.size() != w.size()) {
        throw std::invalid_argument("inner product dimension mismatch");
    }
    cplx s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += std::conj(v[i]) * w[i];
    }
    return s;
}

/// A state vector. Normalized unless constructed through `subnormalized`,
/// which is used for unnormalized branches such as phi_{i,b} or P|psi>.
class PureState {
   public:
    explicit PureState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) {
            throw std::invalid_argument("PureState must have positive dimension");
        }
        if (std::abs(qcoin::norm_squared(amps_) - 1.0) > tol::kNorm) {
            throw std::invalid_argument("PureState is not normalized");
        }
    }

    static PureState subnormalized(std::vector<cplx> amplitudes) {
        if (amplitudes.empty()) {
            throw std::invalid_argument("PureState must have positive dimension");
        }
        if (qcoin::norm_squared(amplitudes) > 1.0 + tol::kNorm) {
            throw std::invalid_argument("subnormalized state has norm above one");
        }
        PureState s;
        s.amps_ = std::move(amplitudes);
        s.subnormalized_ = true;
        return s;
    }

    static PureState basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw std::invalid_argument("basis index out of range");
        }
        std::vector<cplx> v(dim);
        v[index] = 1.0;
        return PureState(std::move(v));
    }

    /// Rescales `amplitudes` to unit norm; throws on a (near) zero vector.
    static PureState normalized(std::vector<cplx> amplitudes) {
        double n = std::sqrt(qcoin::norm_squared(amplitudes));
        if (n <= tol::kNullProbability) {
            throw std::invalid_argument("cannot normalize a zero vector");
        }
        for (auto &x : amplitudes) {
            x /= n;
        }
        return PureState(std::move(amplitudes));
    }

    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    const cplx &operator[](std::size_t i) const { return amps_[i]; }
    bool is_subnormalized() const { return subnormalized_; }
    double norm_squared() const { return qcoin::norm_squared(amps_); }

    ComplexMatrix projector() const { return ComplexMatrix::outer(amps_, amps_); }

   private:
    PureState() = default;
    std::vector<cplx> amps_;
    bool subnormalized_ = false;
};

struct Eigensystem {
    std::vector<double> values;  // descending
    ComplexMatrix vectors;       // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Each rotation first phases the (p,q) entry real and then
/// applies the classical real Jacobi rotation.
inline Eigensystem herm_eig(const ComplexMatrix &h) {
    if (!h.is_square()) {
        throw std::invalid_argument("herm_eig requires a square matrix");
    }
    if (h.hermitian_defect() > tol::kHermitian) {
        throw std::invalid_argument("herm_eig requires a Hermitian matrix");
    }
    const std::size_t n = h.rows();
    ComplexMatrix a = h;
    ComplexMatrix v = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
    }

    double scale = 0;
    for (auto x : a.entries()) {
        scale += std::norm(x);
    }
    scale = std::max(1.0, std::sqrt(scale));

    auto off_mass = [&] {
        double s = 0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                if (r != c) {
                    s += std::norm(a(r, c));
                }
            }
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < tol::kJacobiMaxSweeps && off_mass() > tol::kJacobiOffDiagonal * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag < 1e-300) {
                    continue;
                }
                const cplx phase = a(p, q) / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                // G restricted to span(e_p, e_q) = [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
                const cplx gpp = c;
                const cplx gpq = s;
                const cplx gqp = -s * std::conj(phase);
                const cplx gqq = c * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });
    Eigensystem out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]).real();
        for (std::size_t k = 0; k < n; ++k) {
            out.vectors(k, j) = v(k, order[j]);
        }
    }
    return out;
}

/// V f(diag(lambda)) V^dagger for a Hermitian input.
template <typename F>
ComplexMatrix apply_spectral(const ComplexMatrix &h, F &&f) {
    Eigensystem es = herm_eig(h);
    const std::size_t n = h.rows();
    ComplexMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx fj = f(es.values[j]);
        if (fj == cplx{}) {
            continue;
        }
        for (std::size_t r = 0; r < n; ++r) {
            const cplx vr = es.vectors(r, j) * fj;
            for (std::size_t c = 0; c < n; ++c) {
                out(r, c) += vr * std::conj(es.vectors(c, j));
            }
        }
    }
    return out;
}

/// Eigenvalues in [-kPsd, 0) are clipped to zero before square roots.
inline double clamped_sqrt(double lambda) {
    if (lambda < -tol::kPsd) {
        throw std::invalid_argument("square root of a matrix with a negative eigenvalue");
    }
    return lambda <= 0 ? 0.0 : std::sqrt(lambda);
}

inline ComplexMatrix psd_sqrt(const ComplexMatrix &h) {
    return apply_spectral(h, [](double l) { return cplx(clamped_sqrt(l)); });
}

/// exp(i H) for Hermitian H.
inline ComplexMatrix unitary_exp(const ComplexMatrix &h) {
    return apply_spectral(h, [](double l) { return std::polar(1.0, l); });
}

class DensityMatrix {
   public:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        if (!m_.is_square()) {
            throw std::invalid_argument("density matrix must be square");
        }
        if (m_.hermitian_defect() > tol::kHermitian) {
            throw std::invalid_argument("density matrix must be Hermitian");
        }
        if (std::abs(m_.trace() - 1.0) > tol::kTrace) {
            throw std::invalid_argument("density matrix must have unit trace");
        }
        if (herm_eig(m_).values.back() < -tol::kPsd) {
            throw std::invalid_argument("density matrix must be positive semidefinite");
        }
    }

    static DensityMatrix from_pure(const PureState &s) {
        if (s.is_subnormalized()) {
            throw std::invalid_argument("density matrix of a subnormalized state");
        }
        return DensityMatrix(s.projector());
    }

    std::size_t dim() const { return m_.rows(); }
    const ComplexMatrix &matrix() const { return m_; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

   private:
    ComplexMatrix m_;
};

struct Register {
    std::string label;
    std::size_t dim = 0;

    bool operator==(const Register &) const = default;
};

/// Ordered registers; the leftmost register is the most significant digit
/// of the composite basis index.
class RegisterLayout {
   public:
    RegisterLayout() = default;
    RegisterLayout(std::initializer_list<Register> regs) : regs_(regs) { validate(); }
    explicit RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) { validate(); }

    std::span<const Register> registers() const { return regs_; }
    std::size_t size() const { return regs_.size(); }

    std::size_t total_dim() const {
        std::size_t d = 1;
        for (const auto &r : regs_) {
            d *= r.dim;
        }
        return d;
    }

    std::optional<std::size_t> position(const std::string &label) const {
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            if (regs_[i].label == label) {
                return i;
            }
        }
        return std::nullopt;
    }

    bool contains(const std::string &label) const { return position(label).has_value(); }

    const Register &at(const std::string &label) const {
        auto p = position(label);
        if (!p) {
            throw std::invalid_argument("unknown register label '" + label + "'");
        }
        return regs_[*p];
    }

    /// Per-register digits of a composite basis index.
    std::vector<std::size_t> digits(std::size_t index) const {
        std::vector<std::size_t> d(regs_.size());
        for (std::size_t i = regs_.size(); i-- > 0;) {
            d[i] = index % regs_[i].dim;
            index /= regs_[i].dim;
        }
        return d;
    }

   private:
    void validate() const {
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            if (regs_[i].dim == 0) {
                throw std::invalid_argument("register '" + regs_[i].label + "' has zero dimension");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (regs_[i].label == regs_[j].label) {
                    throw std::invalid_argument("duplicate register label '" + regs_[i].label + "'");
                }
            }
        }
    }

    std::vector<Register> regs_;
};

/// Kronecker product, left operand most significant.
inline ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

inline std::vector<cplx> tensor(std::span<const cplx> a, std::span<const cplx> b) {
    std::vector<cplx> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            out[i * b.size() + k] = a[i] * b[k];
        }
    }
    return out;
}

inline PureState tensor(const PureState &a, const PureState &b) {
    auto v = tensor(a.amplitudes(), b.amplitudes());
    if (a.is_subnormalized() || b.is_subnormalized()) {
        return PureState::subnormalized(std::move(v));
    }
    return PureState(std::move(v));
}

inline DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

/// Traces out every register whose label is not in `keep`; kept registers
/// retain their layout order.
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, const RegisterLayout &layout,
                                   std::span<const std::string> keep) {
    if (!rho.is_square() || rho.rows() != layout.total_dim()) {
        throw std::invalid_argument("partial_trace: layout dimension does not match the matrix");
    }
    std::vector<bool> kept(layout.size(), false);
    for (const auto &label : keep) {
        auto p = layout.position(label);
        if (!p) {
            throw std::invalid_argument("partial_trace: unknown register label '" + label + "'");
        }
        kept[*p] = true;
    }
    std::size_t kept_dim = 1;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (kept[i]) {
            kept_dim *= layout.registers()[i].dim;
        }
    }
    const std::size_t n = rho.rows();
    std::vector<std::size_t> kept_index(n);
    std::vector<std::size_t> traced_index(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        auto d = layout.digits(idx);
        std::size_t k = 0;
        std::size_t t = 0;
        for (std::size_t i = 0; i < layout.size(); ++i) {
            const std::size_t dim = layout.registers()[i].dim;
            if (kept[i]) {
                k = k * dim + d[i];
            } else {
                t = t * dim + d[i];
            }
        }
        kept_index[idx] = k;
        traced_index[idx] = t;
    }
    ComplexMatrix out(kept_dim, kept_dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (traced_index[i] == traced_index[j]) {
                out(kept_index[i], kept_index[j]) += rho(i, j);
            }
        }
    }
    return out;
}

inline DensityMatrix partial_trace(const DensityMatrix &rho, const RegisterLayout &layout,
                                   std::span<const std::string> keep) {
    return DensityMatrix(partial_trace(rho.matrix(), layout, keep));
}

inline DensityMatrix partial_trace(const DensityMatrix &rho, const RegisterLayout &layout,
                                   std::initializer_list<std::string> keep) {
    std::vector<std::string> k(keep);
    return partial_trace(rho, layout, std::span<const std::string>(k));
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm(const ComplexMatrix &a) {
    if (!a.is_hermitian()) {
        throw std::invalid_argument("trace_norm requires a Hermitian matrix");
    }
    double s = 0;
    for (double l : herm_eig(a).values) {
        s += std::abs(l);
    }
    return s;
}

/// Squared convention: F(rho, sigma) = (Tr |sqrt(rho) sqrt(sigma)|)^2.
inline double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const ComplexMatrix x = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    ComplexMatrix xx = x.adjoint() * x;
    // Symmetrize away roundoff so the Hermitian precondition holds exactly.
    xx = (xx + xx.adjoint()) * 0.5;
    double tr = 0;
    for (double l : herm_eig(xx).values) {
        tr += l > 0 ? std::sqrt(l) : 0.0;
    }
    return std::clamp(tr * tr, 0.0, 1.0);
}

struct Projection {
    double probability = 0;
    std::optional<PureState> post_state;
};

inline bool is_projector(const ComplexMatrix &p, double tolerance = tol::kProjector) {
    return p.is_square() && p.hermitian_defect() <= tolerance && (p * p).max_abs_diff(p) <= tolerance;
}

inline Projection project_and_renormalize(const PureState &state, const ComplexMatrix &projector) {
    if (projector.rows() != state.dim()) {
        throw std::invalid_argument("projector dimension does not match the state");
    }
    if (!is_projector(projector)) {
        throw std::invalid_argument("operator is not an orthogonal projector");
    }
    auto projected = projector.apply(state.amplitudes());
    const double p = norm_squared(projected);
    Projection out{p, std::nullopt};
    if (p > tol::kNullProbability) {
        out.post_state = PureState::normalized(std::move(projected));
    }
    return out;
}

/// max |V^dagger V - I|
inline double isometry_defect(const ComplexMatrix &v) {
    return (v.adjoint() * v).max_abs_diff(ComplexMatrix::identity(v.cols()));
}

}  // namespace qcoin
